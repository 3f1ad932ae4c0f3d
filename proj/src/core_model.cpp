#include "crowdsense/core_model.hpp"

#include <cmath>
#include <string>

namespace crowdsense {

namespace {

void require_probability(double rho, const char* what) {
  if (!(rho >= 0.0 && rho <= 1.0)) {
    throw DomainError(std::string(what) + " must lie in [0,1], got " + std::to_string(rho));
  }
}

}  // namespace

BiddingCurve BiddingCurve::power(double scale, double exponent) {
  return power(scale, exponent, scale);
}

BiddingCurve BiddingCurve::power(double scale, double exponent, double b_max) {
  if (!(scale > 0.0) || !std::isfinite(scale)) {
    throw DomainError("bidding curve scale must be positive, got " + std::to_string(scale));
  }
  if (!(exponent >= 1.0) || !std::isfinite(exponent)) {
    throw DomainError("bidding curve exponent must be >= 1, got " + std::to_string(exponent));
  }
  if (!(b_max >= scale)) {
    throw DomainError("b_max " + std::to_string(b_max) + " is below b(1) = " +
                      std::to_string(scale));
  }
  BiddingCurve c;
  c.scale_ = scale;
  c.exponent_ = exponent;
  c.b_max_ = b_max;
  return c;
}

BiddingCurve BiddingCurve::custom(Function bid, Function derivative, double b_max) {
  if (!bid || !derivative) throw DomainError("custom bidding curve needs b and b'");
  if (bid(0.0) != 0.0) throw DomainError("custom bidding curve must satisfy b(0) = 0");
  if (!(bid(1.0) > 0.0) || !(bid(1.0) <= b_max)) {
    throw DomainError("custom bidding curve must satisfy 0 < b(1) <= b_max");
  }
  BiddingCurve c;
  c.scale_ = bid(1.0);
  c.exponent_ = 0.0;
  c.b_max_ = b_max;
  c.custom_ = std::make_shared<const Custom>(Custom{std::move(bid), std::move(derivative)});
  return c;
}

double BiddingCurve::bid(double rho) const {
  if (custom_) return custom_->bid(rho);
  return scale_ * std::pow(rho, exponent_);
}

double BiddingCurve::derivative(double rho) const {
  if (custom_) return custom_->derivative(rho);
  return scale_ * exponent_ * std::pow(rho, exponent_ - 1.0);
}

bool operator==(const BiddingCurve& a, const BiddingCurve& b) {
  if (a.custom_ || b.custom_) return a.custom_ == b.custom_ && a.b_max_ == b.b_max_;
  return a.scale_ == b.scale_ && a.exponent_ == b.exponent_ && a.b_max_ == b.b_max_;
}

RobustnessSpec RobustnessSpec::hard(double epsilon) {
  // epsilon = 0 is admitted: it is the deterministic end of the evaluation grid.
  if (!(epsilon >= 0.0 && epsilon < 1.0)) {
    throw DomainError("epsilon must lie in [0,1), got " + std::to_string(epsilon));
  }
  return RobustnessSpec(HardSpec{epsilon});
}

RobustnessSpec RobustnessSpec::soft(std::vector<double> alpha, double beta) {
  if (!(beta > 0.0 && beta < 1.0)) {
    throw DomainError("beta must lie in (0,1), got " + std::to_string(beta));
  }
  if (alpha.empty()) throw DomainError("alpha must have one entry per location");
  for (std::size_t l = 0; l < alpha.size(); ++l) {
    if (!(alpha[l] > 0.0 && alpha[l] <= 1.0)) {
      throw DomainError("alpha[" + std::to_string(l) + "] must lie in (0,1], got " +
                        std::to_string(alpha[l]));
    }
  }
  return RobustnessSpec(SoftSpec{std::move(alpha), beta});
}

const HardSpec& RobustnessSpec::hard_spec() const {
  if (!is_hard()) throw DomainError("robustness spec is soft, hard spec requested");
  return std::get<HardSpec>(value_);
}

const SoftSpec& RobustnessSpec::soft_spec() const {
  if (!is_soft()) throw DomainError("robustness spec is hard, soft spec requested");
  return std::get<SoftSpec>(value_);
}

Scenario::Scenario(Matrix<int> requirement, Matrix<BiddingCurve> curves, RobustnessSpec spec)
    : requirement_(std::move(requirement)), curves_(std::move(curves)), spec_(std::move(spec)) {
  if (requirement_.rows() == 0 || requirement_.cols() == 0) {
    throw StructuralError("scenario needs T >= 1 and L >= 1");
  }
  if (curves_.rows() != requirement_.rows() || curves_.cols() != requirement_.cols()) {
    throw StructuralError("curve matrix is " + std::to_string(curves_.rows()) + "x" +
                          std::to_string(curves_.cols()) + ", requirement matrix is " +
                          std::to_string(requirement_.rows()) + "x" +
                          std::to_string(requirement_.cols()));
  }
  for (int r : requirement_.flat()) {
    if (r < 1) throw DomainError("every requirement must be >= 1, got " + std::to_string(r));
  }
  if (spec_.is_soft() && spec_.soft_spec().alpha.size() != locations()) {
    throw StructuralError("soft spec has " + std::to_string(spec_.soft_spec().alpha.size()) +
                          " alpha values for " + std::to_string(locations()) + " locations");
  }
}

Scenario Scenario::with_spec(RobustnessSpec spec) const {
  return Scenario(requirement_, curves_, std::move(spec));
}

bool Scenario::is_time_independent(std::size_t l) const {
  for (std::size_t t = 1; t < periods(); ++t) {
    if (requirement_(t, l) != requirement_(0, l) || !(curves_(t, l) == curves_(0, l))) return false;
  }
  return true;
}

bool Scenario::is_time_independent() const {
  for (std::size_t l = 0; l < locations(); ++l) {
    if (!is_time_independent(l)) return false;
  }
  return true;
}

PolicyMatrix::PolicyMatrix(Matrix<double> rho) : rho_(std::move(rho)) {
  for (double v : rho_.flat()) require_probability(v, "policy entry");
}

PolicyMatrix PolicyMatrix::constant(std::size_t periods, std::size_t locations, double value) {
  require_probability(value, "policy entry");
  return PolicyMatrix(Matrix<double>(periods, locations, value));
}

Matrix<double> PolicyMatrix::bids(const Scenario& scenario) const {
  check_same_shape(*this, scenario);
  Matrix<double> out(periods(), locations(), 0.0);
  for (std::size_t t = 0; t < periods(); ++t) {
    for (std::size_t l = 0; l < locations(); ++l) out(t, l) = scenario.curve(t, l).bid(rho_(t, l));
  }
  return out;
}

void check_same_shape(const PolicyMatrix& policy, const Scenario& scenario) {
  if (policy.periods() != scenario.periods() || policy.locations() != scenario.locations()) {
    throw StructuralError("policy is " + std::to_string(policy.periods()) + "x" +
                          std::to_string(policy.locations()) + ", scenario is " +
                          std::to_string(scenario.periods()) + "x" +
                          std::to_string(scenario.locations()));
  }
}

double expected_cell_payment(double rho, int requirement, const BiddingCurve& curve) {
  require_probability(rho, "rho");
  if (rho == 0.0) return 0.0;
  return rho * requirement * curve.bid(rho);
}

double total_payment(const PolicyMatrix& policy, const Scenario& scenario) {
  check_same_shape(policy, scenario);
  double sum = 0.0;
  for (std::size_t t = 0; t < policy.periods(); ++t) {
    for (std::size_t l = 0; l < policy.locations(); ++l) {
      sum += expected_cell_payment(policy(t, l), scenario.requirement(t, l), scenario.curve(t, l));
    }
  }
  return sum;
}

double joint_success_probability(const PolicyMatrix& policy) {
  double log_sum = 0.0;
  for (double rho : policy.values().flat()) {
    if (rho == 0.0) return 0.0;
    log_sum += std::log(rho);
  }
  return std::exp(log_sum);
}

double expected_unsatisfiability(const PolicyMatrix& policy) {
  double sum = 0.0;
  for (double rho : policy.values().flat()) sum += 1.0 - rho;
  return sum;
}

}  // namespace crowdsense
