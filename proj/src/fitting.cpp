#include "gradkit/fitting.hpp"

#include <cmath>

namespace gradkit::fitting {

Eigen::MatrixXd numerical_jacobian(const ResidualFn& fn, const Eigen::VectorXd& params,
                                   const FitOptions& opts) {
    const Eigen::VectorXd r0 = fn(params);
    Eigen::MatrixXd jac(r0.size(), params.size());
    Eigen::VectorXd p = params;
    for (int k = 0; k < params.size(); ++k) {
        const double step =
            std::max(std::abs(params[k]) * opts.jacobian_rel_step, opts.jacobian_abs_floor);
        p[k] = params[k] + step;
        const Eigen::VectorXd rp = fn(p);
        p[k] = params[k] - step;
        const Eigen::VectorXd rm = fn(p);
        p[k] = params[k];
        jac.col(k) = (rp - rm) / (2.0 * step);
    }
    return jac;
}

FitOutcome levenberg_marquardt(const ResidualFn& fn, Eigen::VectorXd params,
                               const FitOptions& opts) {
    Eigen::VectorXd r = fn(params);
    double cost = r.squaredNorm();
    double lambda = opts.lambda0;
    FitOutcome out;
    out.dof = static_cast<int>(r.size() - params.size());

    bool converged = false;
    int iter = 0;
    for (; iter < opts.max_iterations; ++iter) {
        const Eigen::MatrixXd jac = numerical_jacobian(fn, params, opts);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd jtr = jac.transpose() * r;

        // Marquardt scaling: damp along the diagonal of J^T J.
        Eigen::MatrixXd damped = jtj;
        for (int k = 0; k < params.size(); ++k) {
            const double d = std::max(jtj(k, k), 1e-30);
            damped(k, k) = d * (1.0 + lambda);
        }
        const Eigen::VectorXd step = damped.ldlt().solve(-jtr);
        if (!step.allFinite()) {
            lambda *= opts.lambda_up;
            continue;
        }
        const Eigen::VectorXd trial = params + step;
        const Eigen::VectorXd rt = fn(trial);
        const double trial_cost = rt.squaredNorm();
        if (trial_cost <= cost) {
            const double rel_change = (cost - trial_cost) / std::max(cost, 1e-300);
            params = trial;
            r = rt;
            cost = trial_cost;
            lambda /= opts.lambda_down;
            if (rel_change < opts.rel_cost_tol) {
                converged = true;
                ++iter;
                break;
            }
        } else {
            lambda *= opts.lambda_up;
            if (lambda > 1e12) {  // stalled: no descent direction left
                converged = true;
                ++iter;
                break;
            }
        }
    }
    if (!converged) throw FitError("fit did not converge within the iteration budget", params, cost);

    out.params = params;
    out.chi2 = cost;
    out.iterations = iter;
    out.converged = true;

    const Eigen::MatrixXd jac = numerical_jacobian(fn, params, opts);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    Eigen::FullPivLU<Eigen::MatrixXd> lu(jtj);
    if (!lu.isInvertible()) {
        out.degenerate = true;
        out.covariance = Eigen::MatrixXd::Constant(params.size(), params.size(),
                                                   std::numeric_limits<double>::quiet_NaN());
    } else {
        out.covariance = lu.inverse();
        // Enforce exact symmetry against rounding.
        out.covariance = 0.5 * (out.covariance + out.covariance.transpose()).eval();
    }
    return out;
}

}  // namespace gradkit::fitting
