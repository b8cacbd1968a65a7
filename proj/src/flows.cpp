#include "bilip/flows.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "bilip/csv.hpp"
#include "bilip/specfun.hpp"

namespace bilip {

namespace {

const double kLogSqrt2Pi = 0.5 * std::log(2.0 * std::numbers::pi);

constexpr const char* kFlowFormatTag = "pwl_flow_1d";
constexpr const char* kFlowFormatVersion = "v1";

double std_normal_density(double z) { return std::exp(-0.5 * z * z - kLogSqrt2Pi); }

// Q([za, zb]) computed on the tail side with less cancellation.
double latent_interval_mass(double za, double zb) {
  if (!(zb > za)) return 0.0;
  if (za > 0.0) return specfun::normal_cdf(-za) - specfun::normal_cdf(-zb);
  return specfun::normal_cdf(zb) - specfun::normal_cdf(za);
}

}  // namespace

void validate(const BiLipschitzConstants& c) {
  if (!(c.l1 > 0.0) || !(c.l2 > 0.0) || !std::isfinite(c.l1) || !std::isfinite(c.l2)) {
    throw std::domain_error("bi-Lipschitz constants must be positive and finite");
  }
}

PiecewiseLinearFlow1D::PiecewiseLinearFlow1D(std::vector<double> knots_x,
                                             std::vector<double> knots_z, double left_tail_slope,
                                             double right_tail_slope)
    : xs_(std::move(knots_x)),
      zs_(std::move(knots_z)),
      left_tail_(left_tail_slope),
      right_tail_(right_tail_slope) {
  if (xs_.size() < 2 || xs_.size() != zs_.size()) {
    throw std::invalid_argument("PiecewiseLinearFlow1D: need two or more knots in each list");
  }
  if (!(left_tail_ > 0.0) || !(right_tail_ > 0.0) || !std::isfinite(left_tail_) ||
      !std::isfinite(right_tail_)) {
    throw std::invalid_argument("PiecewiseLinearFlow1D: tail slopes must be positive");
  }
  slopes_.resize(xs_.size() - 1);
  for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
    if (!std::isfinite(xs_[i + 1]) || !std::isfinite(zs_[i + 1]) || !std::isfinite(xs_[i]) ||
        !std::isfinite(zs_[i])) {
      throw std::invalid_argument("PiecewiseLinearFlow1D: knots must be finite");
    }
    if (!(xs_[i + 1] > xs_[i]) || !(zs_[i + 1] > zs_[i])) {
      throw std::invalid_argument("PiecewiseLinearFlow1D: knots must be strictly increasing");
    }
    slopes_[i] = (zs_[i + 1] - zs_[i]) / (xs_[i + 1] - xs_[i]);
  }
}

PiecewiseLinearFlow1D PiecewiseLinearFlow1D::identity() {
  return PiecewiseLinearFlow1D({0.0, 1.0}, {0.0, 1.0}, 1.0, 1.0);
}

PiecewiseLinearFlow1D PiecewiseLinearFlow1D::affine(double slope, double offset) {
  if (!(slope > 0.0)) throw std::invalid_argument("affine: slope must be positive");
  return PiecewiseLinearFlow1D({0.0, 1.0}, {offset, offset + slope}, slope, slope);
}

double PiecewiseLinearFlow1D::forward(double x) const {
  if (x <= xs_.front()) return zs_.front() + left_tail_ * (x - xs_.front());
  if (x >= xs_.back()) return zs_.back() + right_tail_ * (x - xs_.back());
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t i = static_cast<std::size_t>(it - xs_.begin()) - 1;
  return zs_[i] + slopes_[i] * (x - xs_[i]);
}

double PiecewiseLinearFlow1D::inverse(double z) const {
  if (z <= zs_.front()) return xs_.front() + (z - zs_.front()) / left_tail_;
  if (z >= zs_.back()) return xs_.back() + (z - zs_.back()) / right_tail_;
  const auto it = std::upper_bound(zs_.begin(), zs_.end(), z);
  const std::size_t i = static_cast<std::size_t>(it - zs_.begin()) - 1;
  return xs_[i] + (z - zs_[i]) / slopes_[i];
}

double PiecewiseLinearFlow1D::slope_at(double x) const {
  const auto it = std::lower_bound(xs_.begin(), xs_.end(), x);
  if (it == xs_.begin()) return left_tail_;
  if (it == xs_.end()) return right_tail_;
  return slopes_[static_cast<std::size_t>(it - xs_.begin()) - 1];
}

double PiecewiseLinearFlow1D::model_density(double x) const {
  return slope_at(x) * std_normal_density(forward(x));
}

double PiecewiseLinearFlow1D::log_model_density(double x) const {
  const double z = forward(x);
  return std::log(slope_at(x)) - 0.5 * z * z - kLogSqrt2Pi;
}

double PiecewiseLinearFlow1D::interval_mass(double a, double b) const {
  return latent_interval_mass(forward(a), forward(b));
}

double PiecewiseLinearFlow1D::min_slope() const {
  double m = std::min(left_tail_, right_tail_);
  for (double s : slopes_) m = std::min(m, s);
  return m;
}

double PiecewiseLinearFlow1D::max_slope() const {
  double m = std::max(left_tail_, right_tail_);
  for (double s : slopes_) m = std::max(m, s);
  return m;
}

AffineFlowD::AffineFlowD(Eigen::MatrixXd matrix, Eigen::VectorXd offset)
    : matrix_(std::move(matrix)), offset_(std::move(offset)) {
  if (matrix_.rows() != matrix_.cols() || matrix_.rows() != offset_.size() ||
      matrix_.rows() < 1) {
    throw std::invalid_argument("AffineFlowD: matrix must be square and match the offset");
  }
  if (!matrix_.allFinite() || !offset_.allFinite()) {
    throw std::invalid_argument("AffineFlowD: non-finite parameters");
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(matrix_, Eigen::ComputeFullU | Eigen::ComputeFullV);
  singular_values_ = svd.singularValues();
  const double smallest = singular_values_[singular_values_.size() - 1];
  if (!(smallest > 0.0) ||
      smallest < singular_values_[0] * std::numeric_limits<double>::epsilon() * matrix_.rows()) {
    throw std::invalid_argument("AffineFlowD: matrix is singular");
  }
  inverse_ = svd.matrixV() * singular_values_.cwiseInverse().asDiagonal() *
             svd.matrixU().transpose();
  log_abs_det_ = singular_values_.array().log().sum();
}

AffineFlowD AffineFlowD::scaling(int dim, double s) {
  return AffineFlowD(Eigen::MatrixXd::Identity(dim, dim) * s, Eigen::VectorXd::Zero(dim));
}

Point AffineFlowD::forward(const Point& x) const { return matrix_ * x + offset_; }

Point AffineFlowD::inverse(const Point& z) const { return inverse_ * (z - offset_); }

double AffineFlowD::abs_det() const { return std::exp(log_abs_det_); }

double AffineFlowD::log_model_density(const Point& x) const {
  const Point z = forward(x);
  return log_abs_det_ - 0.5 * z.squaredNorm() - dim() * kLogSqrt2Pi;
}

double AffineFlowD::model_density(const Point& x) const { return std::exp(log_model_density(x)); }

namespace {

// Smallest double l with 1 / l <= s, so that 1 / l2 never exceeds the slope.
double inverse_bound(double s) {
  double l = 1.0 / s;
  while (1.0 / l > s) l = std::nextafter(l, INFINITY);
  return l;
}

}  // namespace

BiLipschitzConstants certify_bilipschitz(const PiecewiseLinearFlow1D& flow) {
  return {flow.max_slope(), inverse_bound(flow.min_slope())};
}

BiLipschitzConstants certify_bilipschitz(const AffineFlowD& flow) {
  const auto& s = flow.singular_values();
  return {s[0], inverse_bound(s[s.size() - 1])};
}

PiecewiseLinearFlow1D clipped_quantile_flow(const TargetDistribution& target, double l1_max,
                                            double l2_max, int grid) {
  if (target.dim() != 1) throw std::invalid_argument("clipped_quantile_flow: target must be 1D");
  if (grid < 8) throw std::invalid_argument("clipped_quantile_flow: grid must be >= 8");
  if (!(l1_max > 0.0) || !(l2_max > 0.0)) {
    throw std::invalid_argument("clipped_quantile_flow: budgets must be positive");
  }
  const double slope_lo = 1.0 / l2_max;
  const double slope_hi = l1_max;
  if (slope_lo > slope_hi) {
    throw std::invalid_argument("clipped_quantile_flow: budgets require l1_max * l2_max >= 1");
  }

  struct Knot {
    double x;
    double z;
    bool anchor;
  };
  std::vector<Knot> knots;
  knots.reserve(static_cast<std::size_t>(grid) + 1);
  const double median = target.median_1d();
  knots.push_back({median, 0.0, true});
  for (int i = 1; i <= grid; ++i) {
    const double u = static_cast<double>(i) / (grid + 1);
    if (std::fabs(u - 0.5) < 1e-15) continue;
    knots.push_back({target.quantile_1d(u), specfun::normal_quantile(u), false});
  }
  std::sort(knots.begin(), knots.end(), [](const Knot& a, const Knot& b) {
    return a.x < b.x || (a.x == b.x && a.z < b.z);
  });

  // Drop knots that collide in x, never the anchor.
  std::vector<Knot> kept;
  kept.reserve(knots.size());
  for (const auto& k : knots) {
    if (!kept.empty()) {
      const double gap = k.x - kept.back().x;
      if (gap <= 1e-12 * std::max(1.0, std::fabs(k.x))) {
        if (k.anchor) kept.back() = k;
        continue;
      }
    }
    kept.push_back(k);
  }
  if (kept.size() < 2) throw std::runtime_error("clipped_quantile_flow: degenerate quantile grid");

  const std::size_t n = kept.size();
  std::vector<double> slopes(n - 1);
  for (std::size_t i = 0; i + 1 < n; ++i) {
    double s = (kept[i + 1].z - kept[i].z) / (kept[i + 1].x - kept[i].x);
    if (std::isnan(s)) s = slope_lo;
    slopes[i] = std::clamp(s, slope_lo, slope_hi);
  }

  std::size_t anchor = 0;
  while (!kept[anchor].anchor) ++anchor;
  std::vector<double> xs(n);
  for (std::size_t i = 0; i < n; ++i) xs[i] = kept[i].x;
  return flow_from_slopes(std::move(xs), anchor, 0.0, slopes.front(), slopes, slopes.back(), slope_lo,
                          slope_hi);
}

PiecewiseLinearFlow1D flow_from_slopes(std::vector<double> xs, std::size_t anchor, double z_anchor,
                                       double left_tail, std::span<const double> slopes,
                                       double right_tail, double lo, double hi) {
  const std::size_t n = xs.size();
  if (n < 2 || slopes.size() != n - 1 || anchor >= n) {
    throw std::invalid_argument("flow_from_slopes: need n >= 2 knots, n - 1 slopes and a valid anchor");
  }
  if (!(lo > 0.0) || !(hi >= lo)) throw std::invalid_argument("flow_from_slopes: need 0 < lo <= hi");
  const auto realized = [&](const std::vector<double>& zs, std::size_t i) {
    return (zs[i + 1] - zs[i]) / (xs[i + 1] - xs[i]);
  };
  // Spacing of doubles at the larger knot of segment i.
  const auto ulp = [](const std::vector<double>& zs, std::size_t i) {
    const double m = std::max(std::fabs(zs[i]), std::fabs(zs[i + 1]));
    return std::nextafter(m, INFINITY) - m;
  };
  std::vector<double> zs(n);
  zs[anchor] = z_anchor;
  for (std::size_t i = anchor + 1; i < n; ++i) {
    zs[i] = zs[i - 1] + std::clamp(slopes[i - 1], lo, hi) * (xs[i] - xs[i - 1]);
    for (int k = 0; k < 64 && realized(zs, i - 1) > hi; ++k) zs[i] -= ulp(zs, i - 1);
    for (int k = 0; k < 64 && realized(zs, i - 1) < lo; ++k) zs[i] += ulp(zs, i - 1);
  }
  for (std::size_t i = anchor; i-- > 0;) {
    zs[i] = zs[i + 1] - std::clamp(slopes[i], lo, hi) * (xs[i + 1] - xs[i]);
    for (int k = 0; k < 64 && realized(zs, i) > hi; ++k) zs[i] += ulp(zs, i);
    for (int k = 0; k < 64 && realized(zs, i) < lo; ++k) zs[i] -= ulp(zs, i);
  }
  return PiecewiseLinearFlow1D(std::move(xs), std::move(zs), std::clamp(left_tail, lo, hi),
                               std::clamp(right_tail, lo, hi));
}

void write_flow_csv(std::ostream& out, const PiecewiseLinearFlow1D& flow) {
  write_csv_row(out, {kFlowFormatTag, kFlowFormatVersion});
  write_csv_row(out, {"tail_slopes", format_double(flow.left_tail_slope()),
                      format_double(flow.right_tail_slope())});
  write_csv_row(out, {"x", "z"});
  for (std::size_t i = 0; i < flow.knots_x().size(); ++i) {
    write_csv_row(out, {format_double(flow.knots_x()[i]), format_double(flow.knots_z()[i])});
  }
}

PiecewiseLinearFlow1D read_flow_csv(std::istream& in) {
  const CsvTable table = read_csv(in);
  if (table.header.size() < 2 || table.header[0] != kFlowFormatTag ||
      table.header[1] != kFlowFormatVersion) {
    throw std::invalid_argument("flow CSV: missing or unsupported version header");
  }
  if (table.rows.size() < 2 || table.rows[0].size() != 3 || table.rows[0][0] != "tail_slopes" ||
      table.rows[1].size() != 2 || table.rows[1][0] != "x") {
    throw std::invalid_argument("flow CSV: malformed preamble");
  }
  const double left = parse_double(table.rows[0][1]);
  const double right = parse_double(table.rows[0][2]);
  std::vector<double> xs, zs;
  for (std::size_t i = 2; i < table.rows.size(); ++i) {
    if (table.rows[i].size() != 2) throw std::invalid_argument("flow CSV: knot rows need x,z");
    xs.push_back(parse_double(table.rows[i][0]));
    zs.push_back(parse_double(table.rows[i][1]));
  }
  return PiecewiseLinearFlow1D(std::move(xs), std::move(zs), left, right);
}

void save_flow_csv(const std::string& path, const PiecewiseLinearFlow1D& flow) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + path + "'");
  write_flow_csv(out, flow);
}

PiecewiseLinearFlow1D load_flow_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return read_flow_csv(in);
}

}  // namespace bilip
