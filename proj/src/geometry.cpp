#include "ssbe/geometry.hpp"

#include <cmath>
#include <numbers>

#include "ssbe/errors.hpp"

namespace ssbe {

double Domain::volume() const {
  if (kind == Kind::Disk2D) return std::numbers::pi;
  return std::pow(2.0 * half_width, dim);
}

double Domain::boundary_measure() const {
  if (kind == Kind::Disk2D) return 2.0 * std::numbers::pi;
  return 2.0 * dim * std::pow(2.0 * half_width, dim - 1);
}

bool Domain::contains(const Eigen::VectorXd& x) const {
  if (x.size() != dim) return false;
  if (kind == Kind::Disk2D) return x.squaredNorm() < 1.0;
  return x.cwiseAbs().maxCoeff() < half_width;
}

Eigen::VectorXd chart_point(const Chart& chart, const Eigen::VectorXd& xp) {
  const int d = chart.dim();
  if (xp.size() != d - 1) throw DimensionMismatch("chart parameter has the wrong dimension");
  if (xp.size() > 0 && xp.cwiseAbs().maxCoeff() > chart.kappa) {
    throw OutOfChart("chart parameter outside [-kappa, kappa] on chart " + chart.name);
  }
  Eigen::VectorXd local(d);
  local.head(d - 1) = xp;
  local(d - 1) = chart.gamma(xp);
  return chart.frame.transpose() * (local - chart.offset);
}

Eigen::VectorXd chart_tangent(const Chart& chart, const Eigen::VectorXd& xp, int alpha) {
  const int d = chart.dim();
  if (alpha < 0 || alpha >= d - 1) throw InvalidArgument("tangential index out of range");
  Eigen::VectorXd local = Eigen::VectorXd::Zero(d);
  local(alpha) = 1.0;
  local(d - 1) = chart.gamma_gradient(xp)(alpha);
  return chart.frame.transpose() * local;
}

double metric_factor(const Chart& chart, const Eigen::VectorXd& xp) {
  return std::sqrt(1.0 + chart.gamma_gradient(xp).squaredNorm());
}

double tangential_derivative(const Chart& chart, const Eigen::VectorXd& xp,
                             const Eigen::VectorXd& ambient_gradient, int alpha) {
  const int d = chart.dim();
  if (ambient_gradient.size() < d) throw DimensionMismatch("gradient shorter than chart dimension");
  return ambient_gradient.head(d).dot(chart_tangent(chart, xp, alpha));
}

std::optional<Eigen::VectorXd> chart_parameter(const Chart& chart, const Eigen::VectorXd& point,
                                               double tol) {
  const int d = chart.dim();
  const Eigen::VectorXd local = chart.frame * point + chart.offset;
  Eigen::VectorXd xp = local.head(d - 1);
  if (xp.size() > 0 && xp.cwiseAbs().maxCoeff() > chart.kappa + tol) return std::nullopt;
  if (xp.size() > 0) xp = xp.cwiseMax(-chart.kappa).cwiseMin(chart.kappa);
  if (std::abs(local(d - 1) - chart.gamma(xp)) > tol) return std::nullopt;
  return xp;
}

namespace {

Chart disk_chart(std::string name, const Eigen::Matrix2d& frame, double sign, double kappa,
                 bool metric_weight) {
  Chart c;
  c.name = std::move(name);
  c.frame = frame;
  c.offset = Eigen::Vector2d::Zero();
  c.gamma = [sign](const Eigen::VectorXd& xp) { return sign * std::sqrt(1.0 - xp(0) * xp(0)); };
  c.gamma_gradient = [sign](const Eigen::VectorXd& xp) {
    Eigen::VectorXd g(1);
    g(0) = -sign * xp(0) / std::sqrt(1.0 - xp(0) * xp(0));
    return g;
  };
  c.kappa = kappa;
  c.metric_weight = metric_weight;
  return c;
}

// Face x_axis = sign * h. The chart frame lists the remaining coordinates in
// order followed by x_axis; the first parameter is negated when that
// permutation is odd so the frame keeps determinant +1.
Chart box_face(int d, int axis, double sign, double h) {
  Chart c;
  c.name = "x" + std::to_string(axis + 1) + (sign > 0 ? "=+h" : "=-h");
  c.frame = Eigen::MatrixXd::Zero(d, d);
  int row = 0;
  for (int j = 0; j < d; ++j) {
    if (j == axis) continue;
    c.frame(row++, j) = 1.0;
  }
  c.frame(d - 1, axis) = 1.0;
  if (c.frame.determinant() < 0.0) c.frame.row(0) *= -1.0;
  c.offset = Eigen::VectorXd::Zero(d);
  const double height = sign * h;
  c.gamma = [height](const Eigen::VectorXd&) { return height; };
  c.gamma_gradient = [d](const Eigen::VectorXd&) { return Eigen::VectorXd::Zero(d - 1); };
  c.kappa = h;
  c.metric_weight = false;
  return c;
}

}  // namespace

ChartSet make_disk_charts(double kappa, bool metric_weight) {
  if (!(kappa > 0.0 && kappa < 1.0)) throw InvalidArgument("disk chart kappa must lie in (0, 1)");
  // Top and bottom are parameterized by x1; right and left by x2 with frame
  // (x', x_d) = (x2, -x1).
  Eigen::Matrix2d identity = Eigen::Matrix2d::Identity();
  Eigen::Matrix2d side;
  side << 0.0, 1.0, -1.0, 0.0;
  ChartSet set;
  set.charts.push_back(disk_chart("top", identity, +1.0, kappa, metric_weight));
  set.charts.push_back(disk_chart("right", side, -1.0, kappa, metric_weight));
  set.charts.push_back(disk_chart("bottom", identity, -1.0, kappa, metric_weight));
  set.charts.push_back(disk_chart("left", side, +1.0, kappa, metric_weight));
  return set;
}

ChartSet make_charts(const Domain& domain) {
  ChartSet set;
  if (domain.kind == Domain::Kind::Disk2D) {
    set = make_disk_charts(std::sqrt(2.0) / 2.0, true);
  } else if (domain.kind == Domain::Kind::Box) {
    if (domain.dim < 2) throw InvalidArgument("box charts need d >= 2");
    if (!(domain.half_width > 0.0)) throw InvalidArgument("box half width must be positive");
    for (int axis = 0; axis < domain.dim; ++axis) {
      set.charts.push_back(box_face(domain.dim, axis, -1.0, domain.half_width));
      set.charts.push_back(box_face(domain.dim, axis, +1.0, domain.half_width));
    }
  } else {
    throw InvalidArgument("unsupported domain kind");
  }
  set.covers_boundary = boundary_coverage(domain, set, 1000) == 1.0;
  return set;
}

double boundary_coverage(const Domain& domain, const ChartSet& charts, int n, double tol) {
  int covered = 0;
  for (int i = 0; i < n; ++i) {
    Eigen::VectorXd p(domain.dim);
    if (domain.kind == Domain::Kind::Disk2D) {
      const double theta = 2.0 * std::numbers::pi * (i + 0.5) / n;
      p << std::cos(theta), std::sin(theta);
    } else {
      // Walk over faces; spread in-face coordinates on a low-discrepancy
      // sequence, corners and edges included at the ends.
      const int face = i % (2 * domain.dim);
      const int axis = face / 2;
      for (int j = 0; j < domain.dim; ++j) {
        const double frac = std::fmod((i + 1) * (0.6180339887498949 + 0.1 * j), 1.0);
        p(j) = domain.half_width * (2.0 * frac - 1.0);
      }
      if (i >= n - 2 * domain.dim) p.setConstant(domain.half_width);
      p(axis) = (face % 2 ? 1.0 : -1.0) * domain.half_width;
    }
    for (const Chart& c : charts.charts) {
      if (chart_parameter(c, p, tol)) {
        ++covered;
        break;
      }
    }
  }
  return static_cast<double>(covered) / n;
}

}  // namespace ssbe
