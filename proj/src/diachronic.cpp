#include "musekb/diachronic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "musekb/errors.hpp"

namespace musekb {

YearKey year_key_from(std::string_view s) {
    if (s == "review") return YearKey::ReviewYear;
    if (s == "album") return YearKey::AlbumYear;
    throw ParseError("unknown year key '" + std::string(s) + "' (expected review|album)");
}

ValueKind value_kind_from(std::string_view s) {
    if (s == "sentiment") return ValueKind::Sentiment;
    if (s == "rating") return ValueKind::Rating;
    throw ParseError("unknown value kind '" + std::string(s) +
                     "' (expected sentiment|rating)");
}

std::string to_string(YearKey k) {
    return k == YearKey::ReviewYear ? "review" : "album";
}

std::string to_string(ValueKind v) {
    return v == ValueKind::Sentiment ? "sentiment" : "rating";
}

YearSeries yearly_average(const std::vector<Review>& reviews,
                          const std::map<std::string, double>& scores_by_doc,
                          YearKey key, ValueKind value, long* skipped) {
    if (skipped) *skipped = 0;
    std::map<int, std::pair<double, long>> sums;  // year -> (sum, n)
    for (const Review& r : reviews) {
        int year = 0;
        if (key == YearKey::ReviewYear) {
            year = r.review_date.year;
        } else {
            if (!r.album_release_date) {
                if (skipped) ++*skipped;
                continue;
            }
            year = r.album_release_date->year;
        }
        double v = 0.0;
        if (value == ValueKind::Rating) {
            v = r.rating;
        } else {
            const auto it = scores_by_doc.find(r.doc_id);
            if (it == scores_by_doc.end()) {
                if (skipped) ++*skipped;
                continue;
            }
            v = it->second;
        }
        auto& [sum, n] = sums[year];
        sum += v;
        ++n;
    }
    YearSeries out;
    out.points.reserve(sums.size());
    for (const auto& [year, agg] : sums)
        out.points.push_back({year, agg.first / static_cast<double>(agg.second), agg.second});
    return out;
}

YearSeries smooth(const YearSeries& series, int window) {
    if (window < 1 || window % 2 == 0)
        throw ConfigError("smoothing window must be odd and >= 1");
    const size_t n = series.points.size();
    if (n == 0) return series;
    if (static_cast<size_t>(window) > 2 * n - 1)
        throw ValidationError("smoothing window exceeds what the series can mirror");

    const size_t k = static_cast<size_t>(window) / 2;
    // Reflection that includes the edge value: left pad is the first k
    // values reversed, right pad the last k values reversed.
    std::vector<double> padded;
    padded.reserve(n + 2 * k);
    for (size_t i = 0; i < k; ++i) padded.push_back(series.points[k - 1 - i].value);
    for (size_t i = 0; i < n; ++i) padded.push_back(series.points[i].value);
    for (size_t i = 0; i < k; ++i) padded.push_back(series.points[n - 1 - i].value);

    YearSeries out = series;
    for (size_t i = 0; i < n; ++i) {
        double sum = 0.0;
        for (size_t j = 0; j < static_cast<size_t>(window); ++j) sum += padded[i + j];
        out.points[i].value = sum / static_cast<double>(window);
    }
    return out;
}

namespace {

// Continued fraction for the incomplete beta (modified Lentz method).
double beta_cf(double a, double b, double x) {
    constexpr int kMaxIter = 300;
    constexpr double kEps = std::numeric_limits<double>::epsilon();
    constexpr double kTiny = 1e-300;

    const double qab = a + b;
    const double qap = a + 1.0;
    const double qam = a - 1.0;
    double c = 1.0;
    double d = 1.0 - qab * x / qap;
    if (std::abs(d) < kTiny) d = kTiny;
    d = 1.0 / d;
    double h = d;
    for (int m = 1; m <= kMaxIter; ++m) {
        const double m2 = 2.0 * m;
        double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        h *= d * c;
        aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
        d = 1.0 + aa * d;
        if (std::abs(d) < kTiny) d = kTiny;
        c = 1.0 + aa / c;
        if (std::abs(c) < kTiny) c = kTiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 10.0 * kEps) break;
    }
    return h;
}

} // namespace

double incomplete_beta_regularized(double a, double b, double x) {
    if (!(a > 0.0) || !(b > 0.0)) throw ConfigError("beta parameters must be positive");
    if (!(x >= 0.0 && x <= 1.0)) throw ConfigError("beta argument must lie in [0,1]");
    if (x == 0.0) return 0.0;
    if (x == 1.0) return 1.0;
    const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                            a * std::log(x) + b * std::log1p(-x);
    const double front = std::exp(ln_front);
    // The continued fraction converges fast for x < (a+1)/(a+b+2); use the
    // symmetry I_x(a,b) = 1 - I_{1-x}(b,a) otherwise.
    if (x < (a + 1.0) / (a + b + 2.0))
        return front * beta_cf(a, b, x) / a;
    return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_tailed(double t, int df) {
    if (df < 1) throw ConfigError("degrees of freedom must be >= 1");
    const double nu = static_cast<double>(df);
    const double x = nu / (nu + t * t);
    return incomplete_beta_regularized(nu / 2.0, 0.5, x);
}

CorrelationResult pearson(const std::vector<double>& x, const std::vector<double>& y) {
    if (x.size() != y.size()) throw ConfigError("series lengths differ");
    const size_t n = x.size();
    if (n < 3) throw ConfigError("correlation needs at least 3 points");

    double mx = 0.0, my = 0.0;
    for (size_t i = 0; i < n; ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);

    double sxy = 0.0, sxx = 0.0, syy = 0.0;
    for (size_t i = 0; i < n; ++i) {
        const double dx = x[i] - mx;
        const double dy = y[i] - my;
        sxy += dx * dy;
        sxx += dx * dx;
        syy += dy * dy;
    }
    if (sxx == 0.0 || syy == 0.0)
        throw ValidationError("correlation undefined for a constant series");

    double r = sxy / std::sqrt(sxx * syy);
    if (r > 1.0) r = 1.0;
    if (r < -1.0) r = -1.0;

    CorrelationResult res;
    res.r = r;
    res.n = static_cast<long>(n);
    if (std::abs(r) == 1.0) {
        res.p_value = 0.0;
    } else {
        const double df = static_cast<double>(n - 2);
        const double t = std::abs(r) * std::sqrt(df / (1.0 - r * r));
        res.p_value = student_t_two_tailed(t, static_cast<int>(n - 2));
    }
    return res;
}

namespace {

// Linearly interpolated quantile over a sorted copy (the numpy default).
double quantile_sorted(const std::vector<double>& sorted, double q) {
    const double pos = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<size_t>(pos);
    if (lo + 1 >= sorted.size()) return sorted.back();
    const double frac = pos - static_cast<double>(lo);
    return sorted[lo] + frac * (sorted[lo + 1] - sorted[lo]);
}

} // namespace

double silverman_bandwidth(const std::vector<double>& samples) {
    if (samples.empty()) throw ValidationError("bandwidth needs a nonempty sample");
    const size_t n = samples.size();
    double sd = 0.0;
    if (n > 1) {
        double mean = 0.0;
        for (double v : samples) mean += v;
        mean /= static_cast<double>(n);
        double ss = 0.0;
        for (double v : samples) ss += (v - mean) * (v - mean);
        sd = std::sqrt(ss / static_cast<double>(n - 1));
    }
    std::vector<double> sorted = samples;
    std::sort(sorted.begin(), sorted.end());
    const double iqr = quantile_sorted(sorted, 0.75) - quantile_sorted(sorted, 0.25);

    double spread = std::numeric_limits<double>::infinity();
    if (sd > 0.0) spread = std::min(spread, sd);
    if (iqr > 0.0) spread = std::min(spread, iqr / 1.34);
    if (!std::isfinite(spread)) return 1.0;
    return 0.9 * spread * std::pow(static_cast<double>(n), -0.2);
}

DensityCurve kde(const std::vector<double>& samples, std::optional<double> bandwidth,
                 std::optional<std::pair<double, double>> range, size_t points) {
    if (samples.empty()) throw ValidationError("density needs a nonempty sample");
    if (points < 2) throw ConfigError("grid needs at least 2 points");
    if (bandwidth && !(*bandwidth > 0.0))
        throw ValidationError("bandwidth must be positive");
    const double h = bandwidth ? *bandwidth : silverman_bandwidth(samples);

    double lo, hi;
    if (range) {
        lo = range->first;
        hi = range->second;
        if (!(lo < hi)) throw ConfigError("grid range must be increasing");
    } else {
        const auto [mn, mx] = std::minmax_element(samples.begin(), samples.end());
        lo = *mn - 3.0 * h;
        hi = *mx + 3.0 * h;
    }

    DensityCurve curve;
    curve.grid.resize(points);
    curve.density.resize(points);
    const double step = (hi - lo) / static_cast<double>(points - 1);
    const double norm =
        1.0 / (static_cast<double>(samples.size()) * h * std::sqrt(2.0 * std::numbers::pi));
    for (size_t i = 0; i < points; ++i) {
        const double g = lo + step * static_cast<double>(i);
        double sum = 0.0;
        for (double v : samples) {
            const double u = (g - v) / h;
            sum += std::exp(-0.5 * u * u);
        }
        curve.grid[i] = g;
        curve.density[i] = norm * sum;
    }
    return curve;
}

} // namespace musekb
