#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

namespace dirstep {

// Continuous null distributions symmetric about zero: F0(-t) = 1 - F0(t).
enum class DistFamily { Normal, Cauchy, UniformSymmetric };

namespace detail {

inline constexpr double kInvSqrt2 = 0.70710678118654752440;
inline constexpr double kPi = 3.14159265358979323846;

inline double normal_pdf(double t) {
    return 0.39894228040143267794 * std::exp(-0.5 * t * t);
}

// Standard normal CDF via erfc; absolute error well below 1e-12 everywhere.
inline double normal_cdf(double t) {
    return 0.5 * std::erfc(-t * kInvSqrt2);
}

// Standard normal quantile: Acklam's rational approximation polished with two
// Newton steps against normal_cdf, giving close to full double precision.
inline double normal_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile requires p in (0,1)");
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double plow = 0.02425;
    double x;
    if (p < plow) {
        double q = std::sqrt(-2.0 * std::log(p));
        x = (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    } else if (p <= 1.0 - plow) {
        double q = p - 0.5;
        double r = q * q;
        x = (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
            (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
    } else {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        x = -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
            ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    for (int it = 0; it < 2; ++it) {
        double e = normal_cdf(x) - p;
        double dens = normal_pdf(x);
        if (dens > 0.0) x -= e / dens;
    }
    return x;
}

inline double cauchy_cdf(double t) {
    return 0.5 + std::atan(t) / kPi;
}

inline double cauchy_quantile(double p) {
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("quantile requires p in (0,1)");
    return std::tan(kPi * (p - 0.5));
}

// Uniform(-1/2, 1/2).
inline double uniform_cdf(double t) {
    if (t <= -0.5) return 0.0;
    if (t >= 0.5) return 1.0;
    return t + 0.5;
}

inline double uniform_quantile(double p) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument("quantile requires p in [0,1]");
    return p - 0.5;
}

}  // namespace detail

struct NullDistribution {
    DistFamily family = DistFamily::Normal;

    // F0(t) in [0,1], monotone in t, symmetric about zero.
    double cdf(double t) const {
        if (!std::isfinite(t)) throw std::invalid_argument("null_cdf requires finite t");
        switch (family) {
            case DistFamily::Normal: return detail::normal_cdf(t);
            case DistFamily::Cauchy: return detail::cauchy_cdf(t);
            case DistFamily::UniformSymmetric: return detail::uniform_cdf(t);
        }
        throw std::invalid_argument("unknown distribution family");
    }

    double quantile(double p) const {
        switch (family) {
            case DistFamily::Normal: return detail::normal_quantile(p);
            case DistFamily::Cauchy: return detail::cauchy_quantile(p);
            case DistFamily::UniformSymmetric: return detail::uniform_quantile(p);
        }
        throw std::invalid_argument("unknown distribution family");
    }

    const char* name() const {
        switch (family) {
            case DistFamily::Normal: return "normal";
            case DistFamily::Cauchy: return "cauchy";
            case DistFamily::UniformSymmetric: return "uniform";
        }
        throw std::invalid_argument("unknown distribution family");
    }

    static NullDistribution from_name(const std::string& s) {
        if (s == "normal") return {DistFamily::Normal};
        if (s == "cauchy") return {DistFamily::Cauchy};
        if (s == "uniform") return {DistFamily::UniformSymmetric};
        throw std::invalid_argument("unknown distribution family: " + s +
                                    " (expected normal, cauchy or uniform)");
    }
};

inline double null_cdf(const NullDistribution& dist, double t) {
    return dist.cdf(t);
}

}  // namespace dirstep
