#pragma once

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "musekb/corpus.hpp"

namespace musekb {

struct YearPoint {
    int year = 0;
    double value = 0.0;
    long n = 0;  // samples behind the mean
};

struct YearSeries {
    std::vector<YearPoint> points;  // years strictly increasing
};

enum class YearKey { ReviewYear, AlbumYear };
enum class ValueKind { Sentiment, Rating };
YearKey year_key_from(std::string_view s);      // review | album
ValueKind value_kind_from(std::string_view s);  // sentiment | rating
std::string to_string(YearKey k);
std::string to_string(ValueKind v);

// Per-year arithmetic mean of the chosen value. Album keying skips reviews
// without a release date; sentiment values skip reviews absent from the
// scores map. Skips are counted when `skipped` is given.
YearSeries yearly_average(const std::vector<Review>& reviews,
                          const std::map<std::string, double>& scores_by_doc,
                          YearKey key, ValueKind value, long* skipped = nullptr);

// Centered uniform moving average; edges see the series reflected around its
// ends (first/last values included in the mirror). Window must be odd and
// >= 1; windows needing more padding than the series can mirror
// (window > 2n-1) are rejected. Years and sample counts pass through.
YearSeries smooth(const YearSeries& series, int window);

struct CorrelationResult {
    double r = 0.0;
    double p_value = 1.0;  // two-tailed
    long n = 0;
};

// r = cov(x,y)/(sigma_x*sigma_y); p from t = r*sqrt((n-2)/(1-r^2)) against
// Student's t with n-2 degrees of freedom. |r| = 1 gives p = 0. Requires
// equal lengths and n >= 3; zero variance in either argument is an error.
CorrelationResult pearson(const std::vector<double>& x, const std::vector<double>& y);

// Regularized incomplete beta I_x(a,b), continued-fraction evaluation.
double incomplete_beta_regularized(double a, double b, double x);

// Two-tailed tail mass of Student's t with df degrees of freedom.
double student_t_two_tailed(double t, int df);

// h = 0.9*min(sd, IQR/1.34)*n^(-1/5) with sample (n-1) standard deviation
// and linearly interpolated quartiles; a zero spread candidate drops out of
// the min, and 1.0 is returned when both are zero.
double silverman_bandwidth(const std::vector<double>& samples);

struct DensityCurve {
    std::vector<double> grid;
    std::vector<double> density;
};

// Gaussian-kernel density over an evenly spaced grid (default: the sample
// range widened by three bandwidths, 256 points). Bandwidth defaults to
// Silverman's rule; an explicit bandwidth <= 0 is an error.
DensityCurve kde(const std::vector<double>& samples,
                 std::optional<double> bandwidth = {},
                 std::optional<std::pair<double, double>> range = {},
                 size_t points = 256);

} // namespace musekb
