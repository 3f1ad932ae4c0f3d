#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "crowdsense/errors.hpp"

namespace crowdsense {

/// Dense row-major matrix indexed (time slot, location).
template <typename T>
class Matrix {
 public:
  Matrix() = default;
  Matrix(std::size_t rows, std::size_t cols, const T& fill)
      : rows_(rows), cols_(cols), data_(rows * cols, fill) {}
  Matrix(std::size_t rows, std::size_t cols, std::vector<T> data)
      : rows_(rows), cols_(cols), data_(std::move(data)) {
    if (data_.size() != rows_ * cols_) {
      throw StructuralError("matrix data has " + std::to_string(data_.size()) +
                            " entries, expected " + std::to_string(rows_ * cols_));
    }
  }

  std::size_t rows() const { return rows_; }
  std::size_t cols() const { return cols_; }
  std::size_t size() const { return data_.size(); }

  T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
  const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

  std::span<T> flat() { return data_; }
  std::span<const T> flat() const { return data_; }

  std::vector<T> column(std::size_t c) const {
    std::vector<T> out;
    out.reserve(rows_);
    for (std::size_t r = 0; r < rows_; ++r) out.push_back((*this)(r, c));
    return out;
  }

  bool operator==(const Matrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<T> data_;
};

/// Bid needed to induce a given accept-to-participate probability at one
/// (slot, location) cell. The canonical family is b(rho) = scale * rho^exponent;
/// arbitrary strictly increasing convex curves are admitted through custom().
class BiddingCurve {
 public:
  using Function = std::function<double(double)>;

  BiddingCurve() = default;

  /// Power law; b_max defaults to b(1) = scale.
  static BiddingCurve power(double scale, double exponent);
  static BiddingCurve power(double scale, double exponent, double b_max);

  /// General curve described by its value and first derivative on [0,1].
  /// Two custom curves compare equal only if they share the same functions
  /// object (copies of one curve).
  static BiddingCurve custom(Function bid, Function derivative, double b_max);

  double bid(double rho) const;
  double derivative(double rho) const;
  double b_max() const { return b_max_; }

  bool is_power_law() const { return custom_ == nullptr; }
  double scale() const { return scale_; }
  double exponent() const { return exponent_; }

  friend bool operator==(const BiddingCurve& a, const BiddingCurve& b);

 private:
  struct Custom {
    Function bid;
    Function derivative;
  };

  double scale_ = 1.0;
  double exponent_ = 1.0;
  double b_max_ = 1.0;
  std::shared_ptr<const Custom> custom_;
};

struct HardSpec {
  double epsilon = 0.0;
  bool operator==(const HardSpec&) const = default;
};

struct SoftSpec {
  std::vector<double> alpha;
  double beta = 0.5;
  bool operator==(const SoftSpec&) const = default;
};

/// Either a joint (hard) chance constraint with tolerance epsilon, or one soft
/// chance constraint per location with success fraction alpha[l] and
/// confidence beta.
class RobustnessSpec {
 public:
  static RobustnessSpec hard(double epsilon);
  static RobustnessSpec soft(std::vector<double> alpha, double beta);

  bool is_hard() const { return std::holds_alternative<HardSpec>(value_); }
  bool is_soft() const { return !is_hard(); }

  /// Throw DomainError when the other variant is held.
  const HardSpec& hard_spec() const;
  const SoftSpec& soft_spec() const;

  bool operator==(const RobustnessSpec&) const = default;

 private:
  explicit RobustnessSpec(std::variant<HardSpec, SoftSpec> v) : value_(std::move(v)) {}
  std::variant<HardSpec, SoftSpec> value_;
};

/// A crowdsensing task: T slots by L locations, a participant requirement and
/// a bidding curve per cell, and a robustness requirement.
class Scenario {
 public:
  Scenario(Matrix<int> requirement, Matrix<BiddingCurve> curves, RobustnessSpec spec);

  std::size_t periods() const { return requirement_.rows(); }
  std::size_t locations() const { return requirement_.cols(); }
  std::size_t cells() const { return requirement_.size(); }

  int requirement(std::size_t t, std::size_t l) const { return requirement_(t, l); }
  const BiddingCurve& curve(std::size_t t, std::size_t l) const { return curves_(t, l); }
  const Matrix<int>& requirements() const { return requirement_; }
  const Matrix<BiddingCurve>& curves() const { return curves_; }
  const RobustnessSpec& spec() const { return spec_; }

  Scenario with_spec(RobustnessSpec spec) const;

  /// Same requirement and same curve in every slot of column l.
  bool is_time_independent(std::size_t l) const;
  bool is_time_independent() const;

 private:
  Matrix<int> requirement_;
  Matrix<BiddingCurve> curves_;
  RobustnessSpec spec_;
};

/// Accept-to-participate probabilities rho[t][l], each in [0,1].
class PolicyMatrix {
 public:
  PolicyMatrix() = default;
  explicit PolicyMatrix(Matrix<double> rho);
  static PolicyMatrix constant(std::size_t periods, std::size_t locations, double value);

  std::size_t periods() const { return rho_.rows(); }
  std::size_t locations() const { return rho_.cols(); }
  double operator()(std::size_t t, std::size_t l) const { return rho_(t, l); }
  const Matrix<double>& values() const { return rho_; }
  std::vector<double> column(std::size_t l) const { return rho_.column(l); }

  /// Bid prices b_t^l(rho_t^l) implied by the policy.
  Matrix<double> bids(const Scenario& scenario) const;

  bool operator==(const PolicyMatrix&) const = default;

 private:
  Matrix<double> rho_;
};

/// Expected payment rho * r * b(rho) of one cell.
double expected_cell_payment(double rho, int requirement, const BiddingCurve& curve);

/// Sum of expected cell payments over the whole scenario.
double total_payment(const PolicyMatrix& policy, const Scenario& scenario);

/// Probability that every cell meets its requirement, i.e. the product of all
/// rho, accumulated in log space. Exactly 0 when any entry is 0.
double joint_success_probability(const PolicyMatrix& policy);

/// Expected number of cells that miss their requirement: sum of (1 - rho).
double expected_unsatisfiability(const PolicyMatrix& policy);

void check_same_shape(const PolicyMatrix& policy, const Scenario& scenario);

}  // namespace crowdsense
