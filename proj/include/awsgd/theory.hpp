#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "awsgd/engine.hpp"

namespace awsgd {

// ---------------------------------------------------------------------------
// Closed-form bound calculators
// ---------------------------------------------------------------------------

// Squared-hinge average-loss bound R^2 S^2 / (beta n).
double bound_sqhinge_loss(double R, double S, double beta, double n);

// Expected sample count min{(1/2) R S mu sqrt(beta n), (1/2) beta n}.
double bound_sqhinge_samples(double R, double S, double mu, double beta, double n);

// Mistake bound c2^2 R^2 S^2 / (c1^2 omega rho*^2); doubled for sampling
// proportional to the label-scale absolute error.
double bound_perceptron(double c1, double c2, double R, double S, double omega,
                        double rho_star, bool absloss);

struct CArho {
  double closed_form;  // a / (a(rho-1) + 1), an upper bound
  double numeric_sup;  // sup over [0,1] of (1 - u^a) / (rho - u)
};
CArho c_a_rho(double a, double rho);

// Smooth-hinge average-loss bound c R^2 S^2 / (beta n) with c the closed-form
// constant for sampling exactly by the lower envelope, or 2a for any pi
// squeezed between the envelope and beta.
double bound_gsh_loss(double a, double rho, double R, double S, double beta, double n,
                      bool pi_is_star);

struct GshSampleTerms {
  double term_sqrt_n;  // sqrt(beta c) R S / ((rho-1) sqrt(a)) * sqrt(n)
  double term_const;   // c R^2 S^2 / (rho - 1)
  double max_term() const { return std::max(term_sqrt_n, term_const); }
};
// Both scaling terms of the smooth-hinge sample bound (the multiplicative
// constant is unquantified, so only shapes are verifiable).
GshSampleTerms bound_gsh_samples_scaling(double a, double rho, double R, double S,
                                         double beta, double n);

// Adaptive-weight bound rho beta / (c kappa) Lambda* + dist0^2 / (2 c kappa n)
// with kappa = beta min{1/(2L), rho}.
double bound_aws(double beta, double rho, double c, double L, double Lambda_star,
                 double dist0_sq, double n);

struct ConvexSmoothTerms {
  double sigma_term;   // Pi^{-1}(sqrt(2) S sigma / sqrt(n))
  double smooth_term;  // Pi^{-1}(L S^2 / n)
  double total() const { return sigma_term + smooth_term; }
};
// The two computable terms of the smooth-convex bound; the infimum term is
// caller-supplied from a reference minimization.
ConvexSmoothTerms bound_convexsmooth(double L, double S, double sigma_pi, double n,
                                     const PiSpec& pi);
// Closed-form specialization for pi(x) = 1 - e^{-x}; throws below the stated
// n threshold.
ConvexSmoothTerms bound_convexsmooth_corollary1(double L, double S, double sigma_pi,
                                                double n);

// Sample-count bounds: pi(mean loss) * n for concave pi, min{K total, n} for
// K-Lipschitz pi.
double bound_sample_count_concave(const PiSpec& pi, double mean_loss, double n);
double bound_sample_count_lipschitz(double K, double total_loss, double n);

struct EquivalentLossReport {
  double max_rel_error = 0.0;
  double worst_coordinate = 0.0;
};
// Compares the exact enumeration of E[pi(l) grad l] against central finite
// differences of E[Pi(l)] on a finite dataset.
EquivalentLossReport equivalent_loss_check(const PiSpec& pi, const LossKind& loss,
                                           const Dataset& ds, const ModelParams& theta,
                                           double fd_step);

// ---------------------------------------------------------------------------
// Empirical verification harness
// ---------------------------------------------------------------------------

struct BoundReport {
  std::string name;
  double theoretical = 0.0;
  double empirical = 0.0;
  bool holds = false;  // empirical <= theoretical * (1 + 1e-9) + 1e-12
  double slack = 0.0;  // theoretical - empirical
  std::string config_echo;
};

BoundReport make_report(const std::string& name, double theoretical, double empirical,
                        const std::string& echo);

struct MeanSE {
  double mean = 0.0;
  double se = 0.0;
  int n = 0;
};
MeanSE mean_se(std::span<const double> values);

// Fan a seed-indexed statistic over a worker pool, results in seed order.
std::vector<double> collect_over_seeds(int n_seeds, int jobs,
                                       const std::function<double(int)>& statistic);

// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

// Reference minimizer: full-batch projected gradient descent on the mean
// training loss.
ModelParams full_gd_minimize(const Dataset& ds, const LossKind& loss,
                             const ProjectionBall& ball, double step, int iters);

// Named verification suites (one per theorem or lemma under test).
std::vector<std::string> verify_suite_names();
std::vector<BoundReport> run_verify_suite(const std::string& name, int jobs);

std::vector<BoundReport> verify_thm_squared_hinge(int jobs);
std::vector<BoundReport> verify_thm_sample_scaling(int jobs);
std::vector<BoundReport> verify_thm_perceptron(int jobs);
std::vector<BoundReport> verify_thm_gsh(int jobs);
std::vector<BoundReport> verify_thm_gsh_sampling(int jobs);
std::vector<BoundReport> verify_thm_aws(int jobs);
std::vector<BoundReport> verify_cor_aws_uncertainty(int jobs);
std::vector<BoundReport> verify_aws_power(int jobs);
std::vector<BoundReport> verify_aws_multiclass(int jobs);
std::vector<BoundReport> verify_lemma_alpha_beta(int jobs);
std::vector<BoundReport> verify_lemma_multiclass_margin(int jobs);
std::vector<BoundReport> verify_lemma_equivalent_loss(int jobs);
std::vector<BoundReport> verify_lemma_h_bounds(int jobs);
std::vector<BoundReport> verify_aws_step_contract(int jobs);
std::vector<BoundReport> verify_pi_machinery(int jobs);
std::vector<BoundReport> verify_beta_noise(int jobs);
std::vector<BoundReport> verify_calibration(int jobs);
std::vector<BoundReport> verify_thm_convex_smooth(int jobs);
std::vector<BoundReport> verify_lemma_sample_count(int jobs);
std::vector<BoundReport> verify_experiment_compare(int jobs);

}  // namespace awsgd
