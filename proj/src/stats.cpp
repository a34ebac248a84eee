#include "synthwright/stats.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>

#include "synthwright/errors.hpp"

namespace synthwright {

namespace {

constexpr double kKsAccept = 0.05;

double mean_of(const std::vector<double>& v) {
    return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double variance_of(const std::vector<double>& v, double mean) {
    double acc = 0.0;
    for (double x : v) acc += (x - mean) * (x - mean);
    return acc / static_cast<double>(v.size());
}

// Nelder-Mead on an n-dimensional function, standard reflection coefficients,
// capped at max_iter simplex steps. Returns the best vertex found.
std::vector<double> nelder_mead(
    const std::function<double(const std::vector<double>&)>& f,
    std::vector<double> x0, int max_iter) {
    const double alpha = 1.0, gamma = 2.0, rho = 0.5, sigma = 0.5;
    const std::size_t n = x0.size();

    std::vector<std::vector<double>> simplex(n + 1, x0);
    for (std::size_t i = 0; i < n; ++i)
        simplex[i + 1][i] += (x0[i] != 0.0) ? 0.05 * std::abs(x0[i]) + 0.05 : 0.1;

    std::vector<double> fx(n + 1);
    for (std::size_t i = 0; i <= n; ++i) fx[i] = f(simplex[i]);

    for (int iter = 0; iter < max_iter; ++iter) {
        std::vector<std::size_t> order(n + 1);
        std::iota(order.begin(), order.end(), 0);
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fx[a] < fx[b]; });
        std::vector<std::vector<double>> sx(n + 1);
        std::vector<double> sf(n + 1);
        for (std::size_t i = 0; i <= n; ++i) {
            sx[i] = simplex[order[i]];
            sf[i] = fx[order[i]];
        }
        simplex = std::move(sx);
        fx = std::move(sf);

        if (std::abs(fx[n] - fx[0]) <= 1e-10 * (std::abs(fx[0]) + 1e-10)) break;

        std::vector<double> centroid(n, 0.0);
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[i][j] / n;

        auto blend = [&](double coeff) {
            std::vector<double> p(n);
            for (std::size_t j = 0; j < n; ++j)
                p[j] = centroid[j] + coeff * (simplex[n][j] - centroid[j]);
            return p;
        };

        std::vector<double> xr = blend(-alpha);
        const double fr = f(xr);
        if (fr < fx[0]) {
            std::vector<double> xe = blend(-gamma);
            const double fe = f(xe);
            if (fe < fr) {
                simplex[n] = xe;
                fx[n] = fe;
            } else {
                simplex[n] = xr;
                fx[n] = fr;
            }
        } else if (fr < fx[n - 1]) {
            simplex[n] = xr;
            fx[n] = fr;
        } else {
            std::vector<double> xc = blend(rho);
            const double fc = f(xc);
            if (fc < fx[n]) {
                simplex[n] = xc;
                fx[n] = fc;
            } else {
                for (std::size_t i = 1; i <= n; ++i) {
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[i][j] = simplex[0][j] + sigma * (simplex[i][j] - simplex[0][j]);
                    fx[i] = f(simplex[i]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t i = 1; i <= n; ++i)
        if (fx[i] < fx[best]) best = i;
    return simplex[best];
}

double neg_log_likelihood(const ContinuousDistribution& d,
                          const std::vector<double>& data) {
    double nll = 0.0;
    for (double x : data) {
        const double lp = d.log_pdf(x);
        if (!std::isfinite(lp)) return std::numeric_limits<double>::infinity();
        nll -= lp;
    }
    return nll;
}

constexpr int kFitIterations = 200;

std::optional<ContinuousDistribution> estimate_uniform(
    const std::vector<double>& data, double lo, double hi) {
    (void)data;
    if (!(hi > lo)) return std::nullopt;
    return make_uniform(lo, hi);
}

std::optional<ContinuousDistribution> estimate_normal(
    const std::vector<double>& data) {
    const double m = mean_of(data);
    const double sd = std::sqrt(variance_of(data, m));
    if (!(sd > 0.0)) return std::nullopt;
    return make_normal(m, sd);
}

std::optional<ContinuousDistribution> estimate_exponential(
    const std::vector<double>& data, double lo) {
    const double m = mean_of(data);
    if (!(m > lo)) return std::nullopt;
    return make_exponential(lo, m - lo);
}

std::optional<ContinuousDistribution> estimate_gamma(
    const std::vector<double>& data, double lo, double hi) {
    const double range = hi - lo;
    if (!(range > 0.0)) return std::nullopt;
    // Anchor the origin just below the sample minimum so every point has
    // positive density regardless of the fitted shape.
    const double loc = lo - 1e-3 * range;
    const double m = mean_of(data) - loc;
    const double v = variance_of(data, mean_of(data));
    if (!(v > 0.0) || !(m > 0.0)) return std::nullopt;
    const double shape0 = m * m / v;
    const double scale0 = v / m;
    if (!(shape0 > 0.0) || !(scale0 > 0.0)) return std::nullopt;

    auto nll = [&](const std::vector<double>& logp) {
        const double shape = std::exp(logp[0]);
        const double scale = std::exp(logp[1]);
        if (!std::isfinite(shape) || !std::isfinite(scale)) return 1e300;
        ContinuousDistribution d = make_gamma(shape, loc, scale);
        const double val = neg_log_likelihood(d, data);
        return std::isfinite(val) ? val : 1e300;
    };
    const std::vector<double> best =
        nelder_mead(nll, {std::log(shape0), std::log(scale0)}, kFitIterations);
    return make_gamma(std::exp(best[0]), loc, std::exp(best[1]));
}

std::optional<ContinuousDistribution> estimate_beta(
    const std::vector<double>& data, double lo, double hi) {
    const double range = hi - lo;
    if (!(range > 0.0)) return std::nullopt;
    // Widen the support a hair so the extreme observations sit strictly
    // inside (0, 1) after rescaling; otherwise their density can vanish.
    const double loc = lo - 1e-3 * range;
    const double scale = range * (1.0 + 2e-3);

    double zm = 0.0;
    for (double x : data) zm += (x - loc) / scale;
    zm /= static_cast<double>(data.size());
    double zv = 0.0;
    for (double x : data) {
        const double z = (x - loc) / scale - zm;
        zv += z * z;
    }
    zv /= static_cast<double>(data.size());
    if (!(zv > 0.0)) return std::nullopt;
    const double common = zm * (1.0 - zm) / zv - 1.0;
    if (!(common > 0.0)) return std::nullopt;
    const double a0 = zm * common;
    const double b0 = (1.0 - zm) * common;
    if (!(a0 > 0.0) || !(b0 > 0.0)) return std::nullopt;

    auto nll = [&](const std::vector<double>& logp) {
        const double a = std::exp(logp[0]);
        const double b = std::exp(logp[1]);
        if (!std::isfinite(a) || !std::isfinite(b)) return 1e300;
        ContinuousDistribution d = make_beta(a, b, loc, scale);
        const double val = neg_log_likelihood(d, data);
        return std::isfinite(val) ? val : 1e300;
    };
    const std::vector<double> best =
        nelder_mead(nll, {std::log(a0), std::log(b0)}, kFitIterations);
    return make_beta(std::exp(best[0]), std::exp(best[1]), loc, scale);
}

} // namespace

std::int64_t FrequencyTable::total() const {
    std::int64_t t = 0;
    for (const auto& [_, c] : counts) t += c;
    return t;
}

void FrequencyTable::add(const std::string& value, std::int64_t n) {
    counts[value] += n;
}

FrequencyTable FrequencyTable::from_column(const std::vector<std::string>& values) {
    FrequencyTable t;
    for (const auto& v : values) t.add(v);
    return t;
}

double kolmogorov_p_value(std::size_t n, double d) {
    if (d <= 0.0) return 1.0;
    const double sn = std::sqrt(static_cast<double>(n));
    const double lambda = (sn + 0.12 + 0.11 / sn) * d;
    double sum = 0.0;
    double sign = 1.0;
    for (int k = 1; k <= 1000; ++k) {
        const double term = std::exp(-2.0 * lambda * lambda * k * k);
        sum += sign * term;
        if (term < 1e-10) break;
        sign = -sign;
    }
    const double p = 2.0 * sum;
    return std::clamp(p, 0.0, 1.0);
}

KsResult ks_test(std::vector<double> data,
                 const std::function<double(double)>& cdf) {
    if (data.empty()) throw ValidationError("ks_test: empty sample");
    std::sort(data.begin(), data.end());
    const double n = static_cast<double>(data.size());
    double d = 0.0;
    for (std::size_t i = 0; i < data.size(); ++i) {
        const double f = cdf(data[i]);
        d = std::max(d, (static_cast<double>(i) + 1.0) / n - f);
        d = std::max(d, f - static_cast<double>(i) / n);
    }
    return {d, kolmogorov_p_value(data.size(), d)};
}

KsResult ks_test(std::vector<double> data, const ContinuousDistribution& dist) {
    return ks_test(std::move(data), [&](double x) { return dist.cdf(x); });
}

Chi2Result chi_square_independence(const std::vector<std::string>& a,
                                   const std::vector<std::string>& b) {
    if (a.size() != b.size())
        throw ValidationError("chi_square_independence: length mismatch");
    if (a.empty()) throw ValidationError("chi_square_independence: empty columns");

    std::map<std::string, std::int64_t> ra, rb;
    std::map<std::pair<std::string, std::string>, std::int64_t> cell;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ++ra[a[i]];
        ++rb[b[i]];
        ++cell[{a[i], b[i]}];
    }
    const double n = static_cast<double>(a.size());
    double stat = 0.0;
    for (const auto& [av, ca] : ra) {
        for (const auto& [bv, cb] : rb) {
            const double expected = static_cast<double>(ca) * static_cast<double>(cb) / n;
            const auto it = cell.find({av, bv});
            const double observed = it == cell.end() ? 0.0 : static_cast<double>(it->second);
            stat += (observed - expected) * (observed - expected) / expected;
        }
    }
    const std::int64_t dof =
        (static_cast<std::int64_t>(ra.size()) - 1) *
        (static_cast<std::int64_t>(rb.size()) - 1);
    double p = 1.0;
    if (dof > 0)
        p = boost::math::gamma_q(static_cast<double>(dof) / 2.0, stat / 2.0);
    return {stat, p, dof};
}

double entropy_bits(const FrequencyTable& table) {
    const double n = static_cast<double>(table.total());
    if (n <= 0.0) return 0.0;
    double h = 0.0;
    for (const auto& [_, c] : table.counts) {
        if (c <= 0) continue;
        const double p = static_cast<double>(c) / n;
        h -= p * std::log2(p);
    }
    return h;
}

double theils_u(const std::vector<std::string>& src,
                const std::vector<std::string>& tgt) {
    if (src.size() != tgt.size())
        throw ValidationError("theils_u: length mismatch");
    if (src.empty()) throw ValidationError("theils_u: empty columns");

    const FrequencyTable t = FrequencyTable::from_column(tgt);
    const double h_t = entropy_bits(t);
    if (h_t == 0.0) return 0.0;

    std::map<std::string, FrequencyTable> by_src;
    for (std::size_t i = 0; i < src.size(); ++i) by_src[src[i]].add(tgt[i]);

    const double n = static_cast<double>(src.size());
    double h_t_given_s = 0.0;
    for (const auto& [_, sub] : by_src) {
        const double w = static_cast<double>(sub.total()) / n;
        h_t_given_s += w * entropy_bits(sub);
    }
    return (h_t - h_t_given_s) / h_t;
}

namespace {

// Shared histogram used by both divergences on numeric samples.
struct SharedHistogram {
    std::vector<double> p;
    std::vector<double> q;
};

SharedHistogram shared_histogram(const std::vector<double>& ps,
                                 const std::vector<double>& qs,
                                 bool smooth) {
    if (ps.empty() || qs.empty())
        throw ValidationError("divergence: empty sample");
    double lo = std::numeric_limits<double>::infinity();
    double hi = -lo;
    for (double x : ps) { lo = std::min(lo, x); hi = std::max(hi, x); }
    for (double x : qs) { lo = std::min(lo, x); hi = std::max(hi, x); }

    const std::size_t smaller = std::min(ps.size(), qs.size());
    std::size_t nbins = static_cast<std::size_t>(
        std::ceil(std::sqrt(static_cast<double>(smaller))));
    nbins = std::clamp<std::size_t>(nbins, 10, 50);
    if (!(hi > lo)) nbins = 1; // all values identical in both samples

    SharedHistogram h;
    h.p.assign(nbins, 0.0);
    h.q.assign(nbins, 0.0);
    auto bin_of = [&](double x) {
        if (nbins == 1) return std::size_t{0};
        auto b = static_cast<std::size_t>((x - lo) / (hi - lo) * nbins);
        return std::min(b, nbins - 1);
    };
    for (double x : ps) h.p[bin_of(x)] += 1.0;
    for (double x : qs) h.q[bin_of(x)] += 1.0;

    const double eps = smooth ? 1e-9 : 0.0;
    double sp = 0.0, sq = 0.0;
    for (std::size_t i = 0; i < nbins; ++i) {
        h.p[i] += eps;
        h.q[i] += eps;
        sp += h.p[i];
        sq += h.q[i];
    }
    for (std::size_t i = 0; i < nbins; ++i) {
        h.p[i] /= sp;
        h.q[i] /= sq;
    }
    return h;
}

double js_from_masses(const std::vector<double>& p, const std::vector<double>& q) {
    // The two directions accumulate separately so that swapping p and q
    // produces the bit-identical result the measure's symmetry promises.
    double toward_p = 0.0;
    double toward_q = 0.0;
    for (std::size_t i = 0; i < p.size(); ++i) {
        const double m = 0.5 * (p[i] + q[i]);
        if (p[i] > 0.0) toward_p += 0.5 * p[i] * std::log2(p[i] / m);
        if (q[i] > 0.0) toward_q += 0.5 * q[i] * std::log2(q[i] / m);
    }
    return std::clamp(toward_p + toward_q, 0.0, 1.0);
}

} // namespace

double kl_divergence(const std::vector<double>& p_samples,
                     const std::vector<double>& q_samples) {
    const SharedHistogram h = shared_histogram(p_samples, q_samples, true);
    double kl = 0.0;
    for (std::size_t i = 0; i < h.p.size(); ++i)
        if (h.p[i] > 0.0) kl += h.p[i] * std::log2(h.p[i] / h.q[i]);
    return std::max(kl, 0.0);
}

double js_divergence(const std::vector<double>& p_samples,
                     const std::vector<double>& q_samples) {
    const SharedHistogram h = shared_histogram(p_samples, q_samples, true);
    return js_from_masses(h.p, h.q);
}

double js_divergence(const FrequencyTable& p, const FrequencyTable& q) {
    const double np = static_cast<double>(p.total());
    const double nq = static_cast<double>(q.total());
    if (np <= 0.0 || nq <= 0.0)
        throw ValidationError("js_divergence: empty frequency table");

    std::set<std::string> keys;
    for (const auto& [k, _] : p.counts) keys.insert(k);
    for (const auto& [k, _] : q.counts) keys.insert(k);

    std::vector<double> pm, qm;
    pm.reserve(keys.size());
    qm.reserve(keys.size());
    for (const auto& k : keys) {
        const auto ip = p.counts.find(k);
        const auto iq = q.counts.find(k);
        pm.push_back(ip == p.counts.end() ? 0.0 : static_cast<double>(ip->second) / np);
        qm.push_back(iq == q.counts.end() ? 0.0 : static_cast<double>(iq->second) / nq);
    }
    return js_from_masses(pm, qm);
}

double ks_acceptance_threshold() { return kKsAccept; }

std::optional<FitResult> fit_distribution(const std::vector<double>& data) {
    if (data.size() < 2)
        throw ValidationError("fit_distribution: need at least 2 samples");
    const auto [lo_it, hi_it] = std::minmax_element(data.begin(), data.end());
    const double lo = *lo_it, hi = *hi_it;
    if (!(hi > lo)) return std::nullopt; // constant column, nothing to fit

    // Candidate order doubles as the tie-break: on equal p-values the
    // earlier family wins.
    std::vector<std::optional<ContinuousDistribution>> candidates;
    candidates.push_back(estimate_uniform(data, lo, hi));
    candidates.push_back(estimate_normal(data));
    candidates.push_back(estimate_beta(data, lo, hi));
    candidates.push_back(estimate_exponential(data, lo));
    candidates.push_back(estimate_gamma(data, lo, hi));

    std::optional<FitResult> best;
    for (const auto& cand : candidates) {
        if (!cand) continue;
        const KsResult ks = ks_test(data, *cand);
        if (ks.p_value <= kKsAccept) continue;
        if (!best || ks.p_value > best->ks_p_value)
            best = FitResult{*cand, ks.p_value, true};
    }
    return best;
}

} // namespace synthwright
