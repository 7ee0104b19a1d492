#include "hydroscale/model.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "hydroscale/errors.hpp"

namespace hydroscale {

namespace {

constexpr std::int64_t kProbeRange = 256;

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

}  // namespace

RateModel RateModel::zero_range() {
  RateModel m;
  m.kind_ = Kind::kZeroRange;
  m.name_ = "zero_range";
  m.kappa_ = 1.0;
  m.h_sup_ = 1.0;
  m.lambda_c_ = std::numeric_limits<double>::infinity();
  m.finish();
  return m;
}

RateModel RateModel::zero_range_capped(int cap) {
  if (cap < 1) throw DomainError("zero_range_capped: cap must be >= 1");
  RateModel m;
  m.kind_ = Kind::kZeroRangeCapped;
  m.name_ = "zero_range_capped:" + std::to_string(cap);
  m.cap_ = cap;
  m.kappa_ = 1.0;
  m.h_sup_ = 1.0;
  m.lambda_c_ = static_cast<double>(cap);
  m.finish();
  return m;
}

RateModel RateModel::exclusion() {
  RateModel m;
  m.kind_ = Kind::kExclusion;
  m.name_ = "exclusion";
  m.kappa_ = 1.0;
  m.h_sup_ = 1.0;
  m.lambda_c_ = std::numeric_limits<double>::infinity();
  m.finish();
  return m;
}

RateModel RateModel::tabulated(std::vector<double> g, std::vector<double> h,
                               std::optional<double> kappa, std::optional<double> h_sup) {
  if (g.size() < 2 || h.empty()) {
    throw DomainError("tabulated model needs at least g(0), g(1) and h(0)");
  }
  RateModel m;
  m.kind_ = Kind::kTabulated;
  m.name_ = "tabulated";
  m.g_table_ = std::move(g);
  m.h_table_ = std::move(h);
  if (kappa) {
    m.kappa_ = *kappa;
  } else {
    double k = 0.0;
    for (std::size_t i = 0; i + 1 < m.g_table_.size(); ++i) {
      k = std::max(k, std::abs(m.g_table_[i + 1] - m.g_table_[i]));
    }
    m.kappa_ = k;
  }
  if (h_sup) {
    m.h_sup_ = *h_sup;
  } else {
    m.h_sup_ = *std::max_element(m.h_table_.begin(), m.h_table_.end());
  }
  m.finish();
  return m;
}

void RateModel::finish() {
  switch (kind_) {
    case Kind::kExclusion:
      m0_ = 1;
      break;
    case Kind::kTabulated:
      for (std::size_t i = 0; i < h_table_.size(); ++i) {
        if (h_table_[i] == 0.0) {
          m0_ = static_cast<std::int64_t>(i);
          break;
        }
      }
      break;
    default:
      break;
  }
  attractive_ = check_attractive(*this, natural_range());
}

std::int64_t RateModel::natural_range() const {
  if (m0_) return *m0_ + 1;
  if (kind_ == Kind::kTabulated) {
    return std::max<std::int64_t>(
        2, static_cast<std::int64_t>(std::max(g_table_.size(), h_table_.size())) - 1);
  }
  return kProbeRange;
}

double RateModel::g(std::int64_t k) const {
  if (k <= 0) return 0.0;
  switch (kind_) {
    case Kind::kZeroRange:
      return static_cast<double>(k);
    case Kind::kZeroRangeCapped:
      return static_cast<double>(std::min<std::int64_t>(k, cap_));
    case Kind::kExclusion:
      return 1.0;
    case Kind::kTabulated: {
      const auto last = static_cast<std::int64_t>(g_table_.size()) - 1;
      if (k <= last) return g_table_[static_cast<std::size_t>(k)];
      return g_table_.back() + kappa_ * static_cast<double>(k - last);
    }
  }
  return 0.0;
}

double RateModel::h(std::int64_t m) const {
  if (m < 0) return 0.0;
  switch (kind_) {
    case Kind::kZeroRange:
    case Kind::kZeroRangeCapped:
      return 1.0;
    case Kind::kExclusion:
      return m == 0 ? 1.0 : 0.0;
    case Kind::kTabulated: {
      if (m0_ && m >= *m0_) return 0.0;
      const auto last = static_cast<std::int64_t>(h_table_.size()) - 1;
      return h_table_[static_cast<std::size_t>(std::min(m, last))];
    }
  }
  return 0.0;
}

std::string ValidationReport::to_string() const {
  std::ostringstream os;
  os.precision(17);
  if (violations.empty()) os << "valid\n";
  for (const auto& v : violations) {
    os << "violated " << v.invariant << " at i=" << v.i;
    if (v.j >= 0) os << " j=" << v.j;
    if (!v.detail.empty()) os << ": " << v.detail;
    os << '\n';
  }
  for (const auto& n : notes) os << "note: " << n << '\n';
  return os.str();
}

ValidationReport validate_rates(const RateModel& model, std::int64_t k_max) {
  if (k_max < 2) throw DomainError("validate_rates: k_max must be >= 2");
  ValidationReport report;
  const auto m0 = model.m0();
  const std::int64_t range = m0 ? std::min(k_max, *m0 + 1) : k_max;
  const double kappa = model.kappa();
  const double h_sup = model.h_sup();
  auto fail = [&](std::string name, std::int64_t i, std::int64_t j, std::string detail) {
    for (const auto& v : report.violations) {
      if (v.invariant == name) return;
    }
    report.violations.push_back({std::move(name), i, j, std::move(detail)});
  };
  auto fmt = [](double a, double b) {
    std::ostringstream os;
    os.precision(17);
    os << "lhs=" << a << " rhs=" << b;
    return os.str();
  };

  if (model.g(0) != 0.0) fail("g_zero_at_origin", 0, -1, fmt(model.g(0), 0.0));
  if (!(model.h(0) > 0.0)) fail("h_positive_at_origin", 0, -1, fmt(model.h(0), 0.0));
  for (std::int64_t k = 0; k <= range; ++k) {
    if (model.g(k) < 0.0 || model.h(k) < 0.0) fail("nonnegative", k, -1, "");
  }
  const std::int64_t g_pos_end = m0 ? std::min(*m0, range) : range;
  for (std::int64_t k = 1; k <= g_pos_end; ++k) {
    if (!(model.g(k) > 0.0)) fail("g_positive", k, -1, fmt(model.g(k), 0.0));
  }
  if (m0) {
    for (std::int64_t m = 0; m <= range; ++m) {
      const bool ok = m < *m0 ? model.h(m) > 0.0 : model.h(m) == 0.0;
      if (!ok) fail("h_support", m, -1, "M0=" + std::to_string(*m0));
    }
  }
  for (std::int64_t k = 0; k < range; ++k) {
    const double step = std::abs(model.g(k + 1) - model.g(k));
    if (step > kappa * (1.0 + 1e-12)) fail("g_lipschitz", k, -1, fmt(step, kappa));
  }
  for (std::int64_t k = 0; k <= range; ++k) {
    const double bound = kappa * static_cast<double>(k);
    if (model.g(k) > bound * (1.0 + 1e-12)) fail("g_linear_bound", k, -1, fmt(model.g(k), bound));
  }
  for (std::int64_t m = 0; m <= range; ++m) {
    if (model.h(m) > h_sup * (1.0 + 1e-12)) fail("h_bounded", m, -1, fmt(model.h(m), h_sup));
  }
  // g(i)h(j) - g(j)h(i) = h(0)(g(i) - g(j)); antisymmetric in (i, j), so i > j suffices.
  const std::int64_t compat_end = m0 ? std::min(*m0, range) : range;
  const double h0 = model.h(0);
  for (std::int64_t i = 1; i <= compat_end; ++i) {
    for (std::int64_t j = 0; j < i; ++j) {
      const double lhs = model.g(i) * model.h(j) - model.g(j) * model.h(i);
      const double rhs = h0 * (model.g(i) - model.g(j));
      if (!close(lhs, rhs)) fail("product_compatibility", i, j, fmt(lhs, rhs));
    }
  }
  if (!m0) {
    report.notes.push_back("h never vanishes on the checked range; rho_c = infinity is assumed, not verified");
  }
  return report;
}

bool check_attractive(const RateModel& model, std::int64_t k_max) {
  if (k_max < 2) throw DomainError("check_attractive: k_max must be >= 2");
  for (std::int64_t k = 0; k < k_max; ++k) {
    if (model.g(k + 1) < model.g(k)) return false;
    if (model.h(k + 1) > model.h(k)) return false;
  }
  return true;
}

}  // namespace hydroscale
