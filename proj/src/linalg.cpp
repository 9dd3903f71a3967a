#include "pdmp/linalg.hpp"

#include <array>
#include <cmath>

namespace pdmp {

Eigen::MatrixXd expm(const Eigen::MatrixXd& a) {
    const Eigen::Index n = a.rows();
    const double norm = a.cwiseAbs().rowwise().sum().maxCoeff();
    int squarings = 0;
    if (norm > 0.5) squarings = static_cast<int>(std::ceil(std::log2(norm / 0.5)));
    const Eigen::MatrixXd s = a / std::ldexp(1.0, squarings);

    // c_k = (2m - k)! m! / ((2m)! k! (m - k)!), m = 6
    constexpr std::array<double, 7> c = {
        1.0, 0.5, 5.0 / 44.0, 1.0 / 66.0, 1.0 / 792.0, 1.0 / 15840.0, 1.0 / 665280.0,
    };
    const Eigen::MatrixXd id = Eigen::MatrixXd::Identity(n, n);
    const Eigen::MatrixXd s2 = s * s;
    const Eigen::MatrixXd s4 = s2 * s2;
    const Eigen::MatrixXd s6 = s4 * s2;
    const Eigen::MatrixXd even = c[0] * id + c[2] * s2 + c[4] * s4 + c[6] * s6;
    const Eigen::MatrixXd odd = s * (c[1] * id + c[3] * s2 + c[5] * s4);

    Eigen::MatrixXd r = (even - odd).partialPivLu().solve(even + odd);
    for (int k = 0; k < squarings; ++k) r = r * r;
    return r;
}

}  // namespace pdmp
