// Independent reference computations for the unit and acceptance tests.
// Nothing here calls into the library's numerical code.
#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <set>
#include <vector>

#include <boost/multiprecision/cpp_dec_float.hpp>
#include <boost/multiprecision/cpp_int.hpp>

namespace oracle {

using Rational = boost::multiprecision::cpp_rational;
using BigInt = boost::multiprecision::cpp_int;
using Dec50 = boost::multiprecision::cpp_dec_float_50;

inline BigInt binomial(int n, int k)
{
    BigInt r = 1;
    for (int i = 1; i <= k; ++i)
        r = r * (n - k + i) / i;
    return r;
}

inline BigInt factorial(int n)
{
    BigInt r = 1;
    for (int i = 2; i <= n; ++i)
        r *= i;
    return r;
}

/// Term-by-term alternating sum in exact arithmetic.
inline Rational phi(int nu, const Rational& mg)
{
    Rational sum = 0;
    Rational power = 1;
    for (int k = 0; k < nu; ++k) {
        const Rational term = power * Rational(factorial(nu - 1), factorial(k));
        sum += ((nu - 1 + k) % 2 == 0) ? term : Rational(-term);
        power *= mg;
    }
    return sum;
}

/// Exact error-floor sum for rational load g = g_num / g_den.
inline Rational error_floor(const Rational& g, int m, const std::vector<int>& nu, const std::vector<int>& mu,
                            const std::vector<int>& c, int degree = 3)
{
    Rational total = 0;
    const BigInt frame = binomial(m, degree);
    for (std::size_t s = 0; s < nu.size(); ++s) {
        BigInt denom = factorial(nu[s]);
        for (int i = 0; i < nu[s]; ++i)
            denom *= frame;
        total += phi(nu[s], g * m) * Rational(BigInt(nu[s] * c[s]) * binomial(m, mu[s]), denom);
    }
    return total;
}

/// Adaptive Simpson on [a, b].
template <class F>
long double simpson(F&& f, long double a, long double b, long double eps, int depth = 60)
{
    struct Seg {
        static long double run(F& f, long double a, long double b, long double fa, long double fm, long double fb,
                               long double whole, long double eps, int depth)
        {
            const long double m = (a + b) / 2, lm = (a + m) / 2, rm = (m + b) / 2;
            const long double flm = f(lm), frm = f(rm);
            const long double left = (m - a) / 6 * (fa + 4 * flm + fm);
            const long double right = (b - m) / 6 * (fm + 4 * frm + fb);
            if (depth <= 0 || std::fabs(left + right - whole) <= 15 * eps)
                return left + right + (left + right - whole) / 15;
            return run(f, a, m, fa, flm, fm, left, eps / 2, depth - 1) + run(f, m, b, fm, frm, fb, right, eps / 2, depth - 1);
        }
    };
    const long double fa = f(a), fb = f(b), fm = f((a + b) / 2);
    return Seg::run(f, a, b, fa, fm, fb, (b - a) / 6 * (fa + 4 * fm + fb), eps, depth);
}

/// Gaussian tail by quadrature of the density.
inline double q_function(double x)
{
    auto density = [](long double t) { return std::exp(-t * t / 2) / std::sqrt(2 * 3.14159265358979323846264338327950288L); };
    if (x < 0)
        return 1.0 - q_function(-x);
    // split into unit pieces so the adaptive rule sees a smooth integrand
    long double acc = 0;
    const long double top = 40.0L;
    for (long double a = x; a < top; a += 1.0L)
        acc += simpson(density, a, std::min(a + 1.0L, top), 1e-20L);
    return static_cast<double>(acc);
}

inline double channel_load(int n, double rho, int m)
{
    const Dec50 r(rho);
    const Dec50 q = boost::multiprecision::pow(Dec50(1) - r, m);
    return static_cast<double>(Dec50(n) * (Dec50(1) - q) / Dec50(m));
}

/// Stationary law of the frame-start offset chain on [0, blocks * m) by
/// power iteration. Moves past the last block stay in place, so blocks
/// before the last one are exact and the last one holds the remaining tail.
inline std::vector<double> offset_chain_stationary(double xi, const std::vector<double>& p_b, int blocks,
                                                   int iterations)
{
    const int m = static_cast<int>(p_b.size());
    const int states = blocks * m;
    std::vector<double> pi(states, 0.0), next(states);
    pi[0] = 1.0;
    for (int it = 0; it < iterations; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        double total = 0;
        for (int i = 0; i < states; ++i)
            total += pi[i];
        for (int j = 0; j < m; ++j)
            next[j] += xi * p_b[j] * total;
        for (int i = 0; i < states; ++i) {
            const int j = i + m < states ? i + m : i;
            next[j] += (1 - xi) * pi[i];
        }
        pi.swap(next);
    }
    return pi;
}

/// Joint (level, activity) chain of the bursty model by power iteration;
/// index 2*l is silent, 2*l+1 active. The last level absorbs overflow.
inline std::vector<double> bursty_joint_stationary(double lambda, double sigma, double plr, int levels, int iterations)
{
    const int states = 2 * levels;
    std::vector<double> pi(states, 0.0), next(states);
    pi[0] = 1.0;
    auto up = [&](int l) { return std::min(l + 1, levels - 1); };
    for (int it = 0; it < iterations; ++it) {
        std::fill(next.begin(), next.end(), 0.0);
        for (int l = 0; l < levels; ++l) {
            const double s = pi[2 * l], a = pi[2 * l + 1];
            // silent: stays silent or wakes up, no transmission
            next[2 * up(l)] += s * (1 - lambda);
            next[2 * up(l) + 1] += s * lambda;
            // active: transmits; success restarts the level
            next[0] += a * (1 - plr) * sigma;
            next[1] += a * (1 - plr) * (1 - sigma);
            next[2 * up(l)] += a * plr * sigma;
            next[2 * up(l) + 1] += a * plr * (1 - sigma);
        }
        pi.swap(next);
    }
    return pi;
}

/// Every final decoded set reachable by some peeling order.
inline std::set<std::vector<int>> peeling_fixpoints(int m, const std::vector<std::vector<int>>& users)
{
    const int u = static_cast<int>(users.size());
    std::set<std::uint32_t> seen;
    std::set<std::vector<int>> finals;
    std::function<void(std::uint32_t)> visit = [&](std::uint32_t decoded) {
        if (!seen.insert(decoded).second)
            return;
        std::vector<int> count(m, 0), owner(m, -1);
        for (int i = 0; i < u; ++i)
            if (!(decoded >> i & 1u))
                for (int s : users[i]) {
                    ++count[s];
                    owner[s] = i;
                }
        bool any = false;
        for (int s = 0; s < m; ++s)
            if (count[s] == 1) {
                any = true;
                visit(decoded | (1u << owner[s]));
            }
        if (!any) {
            std::vector<int> out;
            for (int i = 0; i < u; ++i)
                if (decoded >> i & 1u)
                    out.push_back(i);
            finals.insert(out);
        }
    };
    visit(0);
    return finals;
}

}  // namespace oracle
