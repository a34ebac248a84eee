#include "synthwright/distribution.hpp"

#include <boost/math/special_functions/beta.hpp>
#include <boost/math/special_functions/erf.hpp>
#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <sstream>

#include "synthwright/errors.hpp"

namespace synthwright {

namespace {

constexpr double kRoot2 = 1.4142135623730951;

double norm_cdf(double z) { return 0.5 * std::erfc(-z / kRoot2); }

double norm_quantile(double p) {
    // erf_inv is well-conditioned on (-1, 1); p is validated by the caller.
    return -kRoot2 * boost::math::erfc_inv(2.0 * p);
}

} // namespace

std::string family_name(DistFamily f) {
    switch (f) {
        case DistFamily::Uniform: return "uniform";
        case DistFamily::Normal: return "normal";
        case DistFamily::Exponential: return "exponential";
        case DistFamily::Gamma: return "gamma";
        case DistFamily::Beta: return "beta";
    }
    return "unknown";
}

DistFamily family_from_name(const std::string& name) {
    if (name == "uniform") return DistFamily::Uniform;
    if (name == "normal") return DistFamily::Normal;
    if (name == "exponential") return DistFamily::Exponential;
    if (name == "gamma") return DistFamily::Gamma;
    if (name == "beta") return DistFamily::Beta;
    throw ValidationError("unknown distribution family: " + name);
}

double ContinuousDistribution::pdf(double x) const {
    switch (family) {
        case DistFamily::Uniform:
            return (x >= loc && x <= loc + scale && scale > 0.0) ? 1.0 / scale : 0.0;
        case DistFamily::Normal: {
            const double z = (x - a) / b;
            return std::exp(-0.5 * z * z) / (b * std::sqrt(2.0 * M_PI));
        }
        case DistFamily::Exponential: {
            if (x < loc) return 0.0;
            return std::exp(-(x - loc) / scale) / scale;
        }
        case DistFamily::Gamma: {
            const double z = (x - loc) / scale;
            if (z <= 0.0) return 0.0;
            return std::exp((a - 1.0) * std::log(z) - z - std::lgamma(a)) / scale;
        }
        case DistFamily::Beta: {
            const double z = (x - loc) / scale;
            if (z <= 0.0 || z >= 1.0) return 0.0;
            const double lognorm =
                std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b);
            return std::exp(lognorm + (a - 1.0) * std::log(z) +
                            (b - 1.0) * std::log1p(-z)) /
                   scale;
        }
    }
    return 0.0;
}

double ContinuousDistribution::log_pdf(double x) const {
    const double p = pdf(x);
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    return std::log(p);
}

double ContinuousDistribution::cdf(double x) const {
    switch (family) {
        case DistFamily::Uniform: {
            if (x <= loc) return 0.0;
            if (x >= loc + scale) return 1.0;
            return (x - loc) / scale;
        }
        case DistFamily::Normal:
            return norm_cdf((x - a) / b);
        case DistFamily::Exponential: {
            if (x <= loc) return 0.0;
            return -std::expm1(-(x - loc) / scale);
        }
        case DistFamily::Gamma: {
            const double z = (x - loc) / scale;
            if (z <= 0.0) return 0.0;
            return boost::math::gamma_p(a, z);
        }
        case DistFamily::Beta: {
            const double z = (x - loc) / scale;
            if (z <= 0.0) return 0.0;
            if (z >= 1.0) return 1.0;
            return boost::math::ibeta(a, b, z);
        }
    }
    return 0.0;
}

double ContinuousDistribution::quantile(double p) const {
    if (p < 0.0 || p > 1.0)
        throw ValidationError("quantile probability outside [0, 1]");
    switch (family) {
        case DistFamily::Uniform:
            return loc + scale * p;
        case DistFamily::Normal:
            if (p == 0.0) return -std::numeric_limits<double>::infinity();
            if (p == 1.0) return std::numeric_limits<double>::infinity();
            return a + b * norm_quantile(p);
        case DistFamily::Exponential:
            if (p == 1.0) return std::numeric_limits<double>::infinity();
            return loc - scale * std::log1p(-p);
        case DistFamily::Gamma:
            if (p == 1.0) return std::numeric_limits<double>::infinity();
            return loc + scale * boost::math::gamma_p_inv(a, p);
        case DistFamily::Beta:
            return loc + scale * boost::math::ibeta_inv(a, b, p);
    }
    return 0.0;
}

double ContinuousDistribution::sample(Rng& rng) const {
    switch (family) {
        case DistFamily::Uniform:
            return loc + scale * rng.uniform01();
        case DistFamily::Normal:
            return rng.normal(a, b);
        case DistFamily::Exponential:
            return loc + rng.exponential(scale);
        case DistFamily::Gamma:
            return loc + rng.gamma(a, scale);
        case DistFamily::Beta:
            return loc + scale * rng.beta(a, b);
    }
    return 0.0;
}

std::string ContinuousDistribution::describe() const {
    std::ostringstream os;
    switch (family) {
        case DistFamily::Uniform:
            os << "uniform(min=" << loc << ", max=" << loc + scale << ")";
            break;
        case DistFamily::Normal:
            os << "normal(mean=" << a << ", std=" << b << ")";
            break;
        case DistFamily::Exponential:
            os << "exponential(loc=" << loc << ", scale=" << scale << ")";
            break;
        case DistFamily::Gamma:
            os << "gamma(shape=" << a << ", loc=" << loc << ", scale=" << scale << ")";
            break;
        case DistFamily::Beta:
            os << "beta(alpha=" << a << ", beta=" << b << ", loc=" << loc
               << ", scale=" << scale << ")";
            break;
    }
    return os.str();
}

ContinuousDistribution make_uniform(double lo, double hi) {
    if (!(hi > lo)) throw ValidationError("uniform requires max > min");
    ContinuousDistribution d;
    d.family = DistFamily::Uniform;
    d.loc = lo;
    d.scale = hi - lo;
    return d;
}

ContinuousDistribution make_normal(double mean, double sd) {
    if (!(sd > 0.0)) throw ValidationError("normal requires std > 0");
    ContinuousDistribution d;
    d.family = DistFamily::Normal;
    d.a = mean;
    d.b = sd;
    return d;
}

ContinuousDistribution make_exponential(double loc, double scale) {
    if (!(scale > 0.0)) throw ValidationError("exponential requires scale > 0");
    ContinuousDistribution d;
    d.family = DistFamily::Exponential;
    d.loc = loc;
    d.scale = scale;
    return d;
}

ContinuousDistribution make_gamma(double shape, double loc, double scale) {
    if (!(shape > 0.0) || !(scale > 0.0))
        throw ValidationError("gamma requires shape > 0 and scale > 0");
    ContinuousDistribution d;
    d.family = DistFamily::Gamma;
    d.a = shape;
    d.loc = loc;
    d.scale = scale;
    return d;
}

ContinuousDistribution make_beta(double alpha, double beta, double loc, double scale) {
    if (!(alpha > 0.0) || !(beta > 0.0) || !(scale > 0.0))
        throw ValidationError("beta requires alpha, beta, scale > 0");
    ContinuousDistribution d;
    d.family = DistFamily::Beta;
    d.a = alpha;
    d.b = beta;
    d.loc = loc;
    d.scale = scale;
    return d;
}

} // namespace synthwright
