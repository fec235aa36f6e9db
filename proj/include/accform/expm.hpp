#pragma once

// Matrix exponential by Pade scaling and squaring (Higham 2005): pick the
// lowest Pade degree whose theta bounds ||A||_1, else scale into the degree-13
// range and square back. Backward error is at unit roundoff level.

#include <array>
#include <cmath>

#include "accform/numerics.hpp"

namespace accform {

namespace detail {

inline double norm1(const ComplexMatrix& a) {
    return a.size() == 0 ? 0.0 : a.cwiseAbs().colwise().sum().maxCoeff();
}

// U, V with exp(A) ≈ (V - U)^{-1} (V + U) for the low degrees 3, 5, 7, 9.
template <std::size_t N>
void pade_low(const ComplexMatrix& a, const std::array<double, N>& b, ComplexMatrix& u,
              ComplexMatrix& v) {
    const Index n = a.rows();
    const ComplexMatrix a2 = a * a;
    ComplexMatrix pow = ComplexMatrix::Identity(n, n);
    ComplexMatrix odd = b[1] * pow;
    v = b[0] * pow;
    for (std::size_t k = 2; k + 1 < N; k += 2) {
        pow = pow * a2;
        v += b[k] * pow;
        odd += b[k + 1] * pow;
    }
    u = a * odd;
}

inline void pade13(const ComplexMatrix& a, ComplexMatrix& u, ComplexMatrix& v) {
    static constexpr std::array<double, 14> b = {
        64764752532480000.0, 32382376266240000.0, 7771770303897600.0, 1187353796428800.0,
        129060195264000.0,   10559470521600.0,    670442572800.0,     33522128640.0,
        1323241920.0,        40840800.0,          960960.0,           16380.0,
        182.0,               1.0};
    const Index n = a.rows();
    const ComplexMatrix id = ComplexMatrix::Identity(n, n);
    const ComplexMatrix a2 = a * a;
    const ComplexMatrix a4 = a2 * a2;
    const ComplexMatrix a6 = a4 * a2;
    const ComplexMatrix tu = a6 * (b[13] * a6 + b[11] * a4 + b[9] * a2);
    u = a * (tu + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * id);
    const ComplexMatrix tv = a6 * (b[12] * a6 + b[10] * a4 + b[8] * a2);
    v = tv + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * id;
}

}  // namespace detail

inline ComplexMatrix expm(const ComplexMatrix& a) {
    if (a.rows() != a.cols()) throw DimensionError("expm: matrix must be square");
    require_finite(a, "expm");
    const Index n = a.rows();
    if (n == 0) return a;

    static constexpr std::array<double, 4> b3 = {120.0, 60.0, 12.0, 1.0};
    static constexpr std::array<double, 6> b5 = {30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0};
    static constexpr std::array<double, 8> b7 = {17297280.0, 8648640.0, 1995840.0, 277200.0,
                                                 25200.0,    1512.0,    56.0,      1.0};
    static constexpr std::array<double, 10> b9 = {17643225600.0, 8821612800.0, 2075673600.0,
                                                  302702400.0,   30270240.0,   2162160.0,
                                                  110880.0,      3960.0,       90.0,
                                                  1.0};
    constexpr double theta3 = 1.495585217958292e-2;
    constexpr double theta5 = 2.539398330063230e-1;
    constexpr double theta7 = 9.504178996162932e-1;
    constexpr double theta9 = 2.097847961257068e0;
    constexpr double theta13 = 5.371920351148152e0;

    const double nrm = detail::norm1(a);
    ComplexMatrix u, v;
    int squarings = 0;
    if (nrm <= theta3) {
        detail::pade_low(a, b3, u, v);
    } else if (nrm <= theta5) {
        detail::pade_low(a, b5, u, v);
    } else if (nrm <= theta7) {
        detail::pade_low(a, b7, u, v);
    } else if (nrm <= theta9) {
        detail::pade_low(a, b9, u, v);
    } else {
        squarings = std::max(0, static_cast<int>(std::ceil(std::log2(nrm / theta13))));
        detail::pade13(a / std::ldexp(1.0, squarings), u, v);
    }
    ComplexMatrix r = (v - u).partialPivLu().solve(v + u);
    for (int k = 0; k < squarings; ++k) r = r * r;
    return r;
}

}  // namespace accform
