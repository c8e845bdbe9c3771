#ifndef GRADKIT_FITTING_HPP
#define GRADKIT_FITTING_HPP

#include <Eigen/Dense>
#include <functional>
#include <stdexcept>

namespace gradkit::fitting {

// Damped Gauss-Newton (Levenberg-Marquardt) on weighted residuals with a
// numerically estimated Jacobian.
struct FitOptions {
    double lambda0 = 1e-3;     // initial damping
    double lambda_up = 10.0;   // multiply on rejected step
    double lambda_down = 3.0;  // divide on accepted step
    int max_iterations = 500;
    double rel_cost_tol = 1e-12;     // stop when the relative cost change is below this
    double jacobian_rel_step = 1e-6; // central-difference step, relative per parameter
    double jacobian_abs_floor = 1e-9;
};

struct FitOutcome {
    Eigen::VectorXd params;
    Eigen::MatrixXd covariance;  // (J^T J)^-1 of the weighted problem at the optimum
    double chi2 = 0.0;
    int dof = 0;
    int iterations = 0;
    bool converged = false;
    bool degenerate = false;  // rank-deficient Jacobian encountered at the optimum
};

class FitError : public std::runtime_error {
  public:
    FitError(const std::string& what, Eigen::VectorXd best, double best_cost)
        : std::runtime_error(what), best_params(std::move(best)), best_cost(best_cost) {}
    Eigen::VectorXd best_params;
    double best_cost;
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

Eigen::MatrixXd numerical_jacobian(const ResidualFn& fn, const Eigen::VectorXd& params,
                                   const FitOptions& opts = {});

FitOutcome levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd init,
                               const FitOptions& opts = {});

}  // namespace gradkit::fitting

#endif
