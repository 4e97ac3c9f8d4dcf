#include "oracles.hpp"

#include <cmath>

namespace phsub::testing {

double factorial(int n) {
    double f = 1.0;
    for (int k = 2; k <= n; ++k) f *= k;
    return f;
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    return factorial(n) / (factorial(k) * factorial(n - k));
}

namespace {

FockMap apply_linear_creation(const FockMap& state, const Complex (&coeff)[3]) {
    FockMap out;
    for (const auto& [t, amp] : state) {
        for (int k = 0; k < 3; ++k) {
            if (coeff[k] == Complex{}) continue;
            OccupationTriple next = t;
            int* slot = k == 0 ? &next.a : (k == 1 ? &next.b : &next.c);
            *slot += 1;
            out[next] += coeff[k] * std::sqrt(static_cast<double>(*slot)) * amp;
        }
    }
    return out;
}

}  // namespace

FockMap expand_by_creation(Complex r, int l_max, const Eigen::Matrix3cd& u) {
    const Complex row_a[3] = {u(0, 0), u(0, 1), u(0, 2)};
    const Complex row_c[3] = {u(2, 0), u(2, 1), u(2, 2)};
    FockMap total;
    const double norm = std::sqrt(1.0 - std::norm(r));
    for (int l = 0; l <= l_max; ++l) {
        FockMap s{{OccupationTriple{0, 0, 0}, Complex{1.0, 0.0}}};
        for (int k = 0; k < l; ++k) s = apply_linear_creation(s, row_a);
        for (int k = 0; k < l; ++k) s = apply_linear_creation(s, row_c);
        const Complex c = norm * std::pow(r, l) / factorial(l);
        for (const auto& [t, amp] : s) total[t] += c * amp;
    }
    return total;
}

Complex closed_form_rho_sub(double r, int l_max, const Eigen::Matrix3cd& u, int subtracted, double eta, int v1, int v3,
                            int v1p, int v3p) {
    const Complex u11 = u(0, 0);
    const Complex u12 = u(0, 1);
    const Complex u13 = u(0, 2);
    auto ipow = [](Complex base, int k) {
        Complex p{1.0, 0.0};
        for (int i = 0; i < k; ++i) p *= base;
        return p;
    };
    Complex sum{};
    for (int j = subtracted; j <= 2 * l_max; ++j) {
        const int two_l = v1 + j + v3;
        const int two_lp = v1p + j + v3p;
        if (two_l % 2 || two_lp % 2) continue;
        const int l = two_l / 2;
        const int lp = two_lp / 2;
        if (l > l_max || lp > l_max) continue;
        const double w = binomial(j, subtracted) * std::pow(eta, subtracted) * std::pow(1.0 - eta, j - subtracted);
        for (int p1 = 0; p1 <= l; ++p1) {
            for (int p2 = 0; p1 + p2 <= l; ++p2) {
                const int p3 = l - p1 - p2;
                if (v1 < p1 || j < p2 || v3 < p3) continue;
                for (int q1 = 0; q1 <= lp; ++q1) {
                    for (int q2 = 0; q1 + q2 <= lp; ++q2) {
                        const int q3 = lp - q1 - q2;
                        if (v1p < q1 || j < q2 || v3p < q3) continue;
                        const double s_real =
                            std::pow(r, l) / (factorial(p1) * factorial(p2) * factorial(p3)) * factorial(l) /
                            (factorial(v1 - p1) * factorial(j - p2) * factorial(v3 - p3)) * std::pow(r, lp) /
                            (factorial(q1) * factorial(q2) * factorial(q3)) * factorial(lp) /
                            (factorial(v1p - q1) * factorial(j - q2) * factorial(v3p - q3)) *
                            std::pow(std::norm(u12), j) * factorial(j) *
                            std::sqrt(factorial(v1) * factorial(v3) * factorial(v1p) * factorial(v3p));
                        const Complex s = s_real * ipow(u11, p1 + v3 - p3) * ipow(std::conj(u11), q1 + v3p - q3) *
                                          ipow(u13, p3 + v1 - p1) * ipow(std::conj(u13), q3 + v1p - q1);
                        sum += w * s;
                    }
                }
            }
        }
    }
    return (1.0 - r * r) * sum;
}

double geometric_tail_by_summation(double abs_r, int l_max) {
    const double x = abs_r * abs_r;
    double sum = 0.0;
    for (int l = l_max + 1; l < l_max + 5000; ++l) sum += std::pow(x, l);
    return (1.0 - x) * sum;
}

}  // namespace phsub::testing
