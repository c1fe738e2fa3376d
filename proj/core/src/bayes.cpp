#include "symlearn/bayes.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "symlearn/errors.hpp"
#include "symlearn/numeric.hpp"

namespace symlearn {
namespace {

constexpr double kClampEps = 1e-6;

double clamp_prob(double p) { return std::clamp(p, kClampEps, 1.0 - kClampEps); }

void check_alpha(const DirichletPrior& prior) {
    if (prior.alpha.empty()) throw DomainError("dirichlet prior: alpha is empty");
    for (double a : prior.alpha) {
        if (!(a > 0.0) || !std::isfinite(a)) {
            throw DomainError("dirichlet prior: alpha entry " + std::to_string(a) +
                              " must be positive");
        }
    }
}

Vector shifted_logits(const SchemeDistribution& dist, std::span<const double> noise) {
    if (dist.logits.empty()) throw DomainError("scheme distribution has no logits");
    if (!(dist.temperature > 0.0) || !std::isfinite(dist.temperature)) {
        throw DomainError("scheme distribution temperature " + std::to_string(dist.temperature) +
                          " must be positive");
    }
    if (noise.size() != dist.logits.size()) {
        throw ShapeError("gumbel softmax: " + std::to_string(noise.size()) +
                         " noise entries for " + std::to_string(dist.logits.size()) + " logits");
    }
    Vector shifted(dist.logits.size());
    for (std::size_t i = 0; i < shifted.size(); ++i) {
        shifted[i] = (dist.logits[i] + noise[i]) / dist.temperature;
    }
    return shifted;
}

}  // namespace

DirichletPrior jeffreys_prior(std::size_t dim) {
    if (dim == 0) throw DomainError("jeffreys_prior: dimension must be positive");
    return DirichletPrior{Vector(dim, 0.5)};
}

Vector mean_probabilities(const SchemeDistribution& dist) {
    if (dist.logits.empty()) throw DomainError("scheme distribution has no logits");
    return softmax(dist.logits);
}

GumbelSample gumbel_softmax_sample(const SchemeDistribution& dist, RngState& rng) {
    GumbelSample s;
    s.noise.resize(dist.logits.size());
    for (double& g : s.noise) g = standard_gumbel(rng);
    s.pi = gumbel_softmax_pi(dist, s.noise);
    return s;
}

Vector gumbel_softmax_pi(const SchemeDistribution& dist, std::span<const double> noise) {
    return softmax(shifted_logits(dist, noise));
}

Vector gumbel_softmax_backward(const SchemeDistribution& dist, std::span<const double> noise,
                               std::span<const double> pi, std::span<const double> upstream) {
    Vector expect = gumbel_softmax_pi(dist, noise);
    if (pi.size() != expect.size() || upstream.size() != expect.size()) {
        throw ShapeError("gumbel_softmax_backward: pi/upstream size does not match logits");
    }
    for (std::size_t i = 0; i < expect.size(); ++i) {
        if (std::abs(pi[i] - expect[i]) > 1e-12) {
            throw ContractError("gumbel_softmax_backward: pi does not match this noise; "
                                "pass the sample produced by gumbel_softmax_pi");
        }
    }
    // pi = softmax(s), s_i = (phi_i + g_i)/tau:
    // d/dphi_i = (1/tau) * pi_i * (up_i - sum_j up_j pi_j)
    double mix = 0.0;
    for (std::size_t j = 0; j < pi.size(); ++j) mix += upstream[j] * pi[j];
    Vector dphi(pi.size());
    for (std::size_t i = 0; i < pi.size(); ++i) {
        dphi[i] = pi[i] * (upstream[i] - mix) / dist.temperature;
    }
    return dphi;
}

double dirichlet_log_density(std::span<const double> pi, const DirichletPrior& prior) {
    check_alpha(prior);
    if (pi.size() != prior.alpha.size()) {
        throw ShapeError("dirichlet_log_density: pi has " + std::to_string(pi.size()) +
                         " entries but alpha has " + std::to_string(prior.alpha.size()));
    }
    double alpha_sum = 0.0;
    double value = 0.0;
    for (std::size_t i = 0; i < pi.size(); ++i) {
        const double a = prior.alpha[i];
        alpha_sum += a;
        value += (a - 1.0) * std::log(clamp_prob(pi[i])) - std::lgamma(a);
    }
    value += std::lgamma(alpha_sum);
    if (!std::isfinite(value)) {
        throw NumericError("dirichlet_log_density produced a non-finite value");
    }
    return value;
}

Vector dirichlet_log_density_grad(std::span<const double> pi, const DirichletPrior& prior) {
    check_alpha(prior);
    if (pi.size() != prior.alpha.size()) {
        throw ShapeError("dirichlet_log_density_grad: pi has " + std::to_string(pi.size()) +
                         " entries but alpha has " + std::to_string(prior.alpha.size()));
    }
    Vector grad(pi.size(), 0.0);
    for (std::size_t i = 0; i < pi.size(); ++i) {
        if (pi[i] > kClampEps && pi[i] < 1.0 - kClampEps) {
            grad[i] = (prior.alpha[i] - 1.0) / pi[i];
        }
    }
    return grad;
}

double beta_log_density(double p, double a, double b) {
    return dirichlet_log_density(Vector{p, 1.0 - p}, DirichletPrior{Vector{a, b}});
}

double cross_entropy_sum(const Matrix& logits, std::span<const int> labels) {
    if (logits.rows() != labels.size()) {
        throw ShapeError("cross_entropy: " + std::to_string(logits.rows()) + " logit rows for " +
                         std::to_string(labels.size()) + " labels");
    }
    double total = 0.0;
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const int y = labels[r];
        if (y < 0 || static_cast<std::size_t>(y) >= logits.cols()) {
            throw DataError("cross_entropy: label " + std::to_string(y) + " at row " +
                            std::to_string(r) + " is out of range for " +
                            std::to_string(logits.cols()) + " classes");
        }
        total += log_sum_exp(logits.row(r)) - logits(r, static_cast<std::size_t>(y));
    }
    if (!std::isfinite(total)) throw NumericError("cross_entropy produced a non-finite value");
    return total;
}

Matrix cross_entropy_grad(const Matrix& logits, std::span<const int> labels) {
    if (logits.rows() != labels.size()) {
        throw ShapeError("cross_entropy_grad: " + std::to_string(logits.rows()) +
                         " logit rows for " + std::to_string(labels.size()) + " labels");
    }
    Matrix grad(logits.rows(), logits.cols());
    for (std::size_t r = 0; r < logits.rows(); ++r) {
        const int y = labels[r];
        if (y < 0 || static_cast<std::size_t>(y) >= logits.cols()) {
            throw DataError("cross_entropy_grad: label " + std::to_string(y) + " at row " +
                            std::to_string(r) + " is out of range for " +
                            std::to_string(logits.cols()) + " classes");
        }
        Vector p = softmax(logits.row(r));
        double* out = grad.data() + r * grad.cols();
        std::copy(p.begin(), p.end(), out);
        out[static_cast<std::size_t>(y)] -= 1.0;
    }
    return grad;
}

MapLossReport map_loss(const Matrix& batch_logits, std::span<const int> labels,
                       std::span<const double> pi_sample, const DirichletPrior& prior,
                       std::size_t dataset_size) {
    if (dataset_size == 0) throw DomainError("map_loss: dataset_size must be positive");
    if (batch_logits.rows() == 0) throw DomainError("map_loss: empty batch");
    MapLossReport report;
    report.nll = cross_entropy_sum(batch_logits, labels);
    report.neg_log_prior = -dirichlet_log_density(pi_sample, prior);
    report.prior_scale =
        static_cast<double>(batch_logits.rows()) / static_cast<double>(dataset_size);
    report.total = report.nll + report.prior_scale * report.neg_log_prior;
    report.pi_sample.assign(pi_sample.begin(), pi_sample.end());
    if (!std::isfinite(report.total)) {
        throw NumericError("map_loss produced a non-finite objective");
    }
    return report;
}

}  // namespace symlearn
