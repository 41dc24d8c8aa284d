#pragma once

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace bilat {

// Continuous piecewise-linear map R -> R. Stored as ascending kink
// abscissae with values plus the two tail slopes. Every payoff and
// collateral map in the engine lives in this class, which keeps the
// structural predicates (monotonicity, homogeneity, ...) decidable
// instead of sampled.
class PiecewiseLinear {
public:
    PiecewiseLinear() : xs_{0.0}, ys_{0.0}, left_slope_(0.0), right_slope_(0.0) {}

    PiecewiseLinear(std::vector<double> xs, std::vector<double> ys,
                    double left_slope, double right_slope)
        : xs_(std::move(xs)), ys_(std::move(ys)),
          left_slope_(left_slope), right_slope_(right_slope) {
        if (xs_.empty() || xs_.size() != ys_.size())
            throw std::invalid_argument("PiecewiseLinear: mismatched kink arrays");
        if (!std::is_sorted(xs_.begin(), xs_.end()))
            throw std::invalid_argument("PiecewiseLinear: kinks must be ascending");
    }

    static PiecewiseLinear zero() { return PiecewiseLinear(); }

    static PiecewiseLinear constant(double c) {
        return PiecewiseLinear({0.0}, {c}, 0.0, 0.0);
    }

    static PiecewiseLinear linear(double slope, double value_at_zero = 0.0) {
        return PiecewiseLinear({0.0}, {value_at_zero}, slope, slope);
    }

    static PiecewiseLinear call_payoff(double strike) {
        return PiecewiseLinear({strike}, {0.0}, 0.0, 1.0);
    }

    static PiecewiseLinear put_payoff(double strike) {
        return PiecewiseLinear({strike}, {0.0}, -1.0, 0.0);
    }

    // q(y) = (1+alpha1) y^+ - (1+alpha2) y^-
    static PiecewiseLinear haircut(double alpha1, double alpha2) {
        return PiecewiseLinear({0.0}, {0.0}, 1.0 + alpha2, 1.0 + alpha1);
    }

    double operator()(double x) const {
        if (x <= xs_.front()) return ys_.front() + left_slope_ * (x - xs_.front());
        if (x >= xs_.back()) return ys_.back() + right_slope_ * (x - xs_.back());
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
        std::size_t lo = hi - 1;
        double w = (x - xs_[lo]) / (xs_[hi] - xs_[lo]);
        return ys_[lo] + w * (ys_[hi] - ys_[lo]);
    }

    bool is_zero() const {
        if (left_slope_ != 0.0 || right_slope_ != 0.0) return false;
        for (double y : ys_)
            if (y != 0.0) return false;
        return true;
    }

    const std::vector<double>& kinks() const { return xs_; }
    const std::vector<double>& values() const { return ys_; }
    double left_slope() const { return left_slope_; }
    double right_slope() const { return right_slope_; }

    // Slope of the segment containing (x, x + eps).
    double slope_right_of(double x) const {
        if (x >= xs_.back()) return right_slope_;
        if (x < xs_.front()) return left_slope_;
        auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
        std::size_t hi = static_cast<std::size_t>(it - xs_.begin());
        return (ys_[hi] - ys_[hi - 1]) / (xs_[hi] - xs_[hi - 1]);
    }

    double max_abs_slope() const {
        double m = std::max(std::fabs(left_slope_), std::fabs(right_slope_));
        for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
            double s = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
            m = std::max(m, std::fabs(s));
        }
        return m;
    }

    bool monotone_increasing() const {
        if (left_slope_ < 0.0 || right_slope_ < 0.0) return false;
        for (std::size_t i = 0; i + 1 < xs_.size(); ++i)
            if (ys_[i + 1] < ys_[i]) return false;
        return true;
    }

    // True when the map equals a y^+ - b y^- (at most a slope change at the
    // origin). Collinear kinks are ignored.
    bool positively_homogeneous(double tol = 1e-14) const {
        if (std::fabs((*this)(0.0)) > tol) return false;
        double prev = left_slope_;
        for (std::size_t i = 0; i + 1 < xs_.size(); ++i) {
            double s = (ys_[i + 1] - ys_[i]) / (xs_[i + 1] - xs_[i]);
            if (std::fabs(s - prev) > tol && xs_[i] != 0.0) return false;
            prev = s;
        }
        if (std::fabs(right_slope_ - prev) > tol && xs_.back() != 0.0) return false;
        return true;
    }

    PiecewiseLinear scaled(double factor) const {
        PiecewiseLinear r(*this);
        for (double& y : r.ys_) y *= factor;
        r.left_slope_ *= factor;
        r.right_slope_ *= factor;
        return r;
    }

    PiecewiseLinear& operator+=(const PiecewiseLinear& o) {
        std::vector<double> xs;
        xs.reserve(xs_.size() + o.xs_.size());
        std::merge(xs_.begin(), xs_.end(), o.xs_.begin(), o.xs_.end(),
                   std::back_inserter(xs));
        xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
        std::vector<double> ys(xs.size());
        for (std::size_t i = 0; i < xs.size(); ++i)
            ys[i] = (*this)(xs[i]) + o(xs[i]);
        xs_ = std::move(xs);
        ys_ = std::move(ys);
        left_slope_ += o.left_slope_;
        right_slope_ += o.right_slope_;
        return *this;
    }

    friend PiecewiseLinear operator+(PiecewiseLinear a, const PiecewiseLinear& b) {
        a += b;
        return a;
    }

private:
    std::vector<double> xs_, ys_;
    double left_slope_, right_slope_;
};

}  // namespace bilat
