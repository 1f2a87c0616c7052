#include "srl/sde_sim.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <stdexcept>
#include <string>

namespace srl {

void validate(const TimeGrid& grid) {
    if (!(grid.T > 0.0) || !std::isfinite(grid.T)) throw std::invalid_argument("horizon T must be positive");
    if (grid.N < 1) throw std::invalid_argument("number of steps N must be at least 1");
}

namespace {

void require_finite(double v, const char* name) {
    if (!std::isfinite(v)) throw std::invalid_argument(std::string(name) + " must be finite");
}

StepRecord record_reflected(const ReflectedStep& s, double x_pre, double xi_pre, double eta_pre, double eta_post) {
    return {x_pre, xi_pre, eta_pre, s.x_post, s.xi_post, eta_post, s.H, s.c};
}

} // namespace

EpisodeTrace simulate_nonrandomized(const TimeGrid& grid, double x0, double xi0, double x_bar,
                                    const ModelParams& params, RngSeed seed) {
    validate(grid);
    require_finite(x0, "x0");
    require_finite(xi0, "xi0");
    require_finite(x_bar, "x_bar");
    Rng rng(seed.seed, seed.stream, StreamTag::increments);
    const double dt = grid.dt();

    EpisodeTrace trace;
    trace.grid = grid;
    trace.steps.reserve(grid.N);
    trace.activation_time = 0.0;
    trace.activation_step = 0;
    double x = x0;
    double xi = xi0;
    for (std::size_t n = 0; n < grid.N; ++n) {
        const double inc = step_increment(rng, params.mu, params.sigma, dt);
        const ReflectedStep s =
            reflected_step(x, xi, std::exp(-params.beta * grid.t(n)), dt, x_bar, params.a, params.c, inc);
        trace.steps.push_back(record_reflected(s, x, xi, 0.0, 0.0));
        x = s.x_next;
        xi = s.xi_next;
    }
    trace.x_end = x;
    trace.xi_end = xi;
    return trace;
}

EpisodeTrace simulate_randomized(const TimeGrid& grid, double x0, double xi0, double eta0, double x_bar,
                                 const Theta& theta, const ModelParams& params, double lambda, RngSeed seed) {
    validate(grid);
    require_finite(x0, "x0");
    require_finite(xi0, "xi0");
    require_finite(x_bar, "x_bar");
    if (!(eta0 >= 0.0 && eta0 <= 1.0)) throw std::invalid_argument("eta0 must lie in [0, 1]");
    if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");

    Rng rng(seed.seed, seed.stream, StreamTag::increments);
    Rng coin(seed.seed, seed.stream, StreamTag::activation);
    const double z = coin.uniform();
    const double dt = grid.dt();
    const double rate = params.beta / lambda;

    EpisodeTrace trace;
    trace.grid = grid;
    trace.steps.reserve(grid.N);
    double x = x0;
    double xi = xi0;
    double eta = eta0;
    // eta runs along the uncontrolled path, which leaves x once reflection starts.
    double free_x = x0;
    for (std::size_t n = 0; n < grid.N; ++n) {
        const double t = grid.t(n);
        const double discount = std::exp(-params.beta * t);
        const double boundary = std::exp(-rate * phi_theta(free_x, theta, x_bar, params.c));
        const double eta_post = std::max(eta, boundary);
        if (!trace.activated() && eta_post > z) {
            trace.activation_step = static_cast<std::ptrdiff_t>(n);
            trace.activation_time = t;
        }
        const double inc = step_increment(rng, params.mu, params.sigma, dt);
        free_x += inc;
        if (trace.activated()) {
            const ReflectedStep s = reflected_step(x, xi, discount, dt, x_bar, params.a, params.c, inc);
            trace.steps.push_back(record_reflected(s, x, xi, eta, eta_post));
            x = s.x_next;
            xi = s.xi_next;
        } else {
            const double h = discount * std::exp(params.a * x) * dt;
            trace.steps.push_back({x, xi, eta, x, xi, eta_post, h, 0.0});
            x += inc;
        }
        eta = eta_post;
    }
    trace.x_end = x;
    trace.xi_end = xi;
    trace.eta_end = eta;
    return trace;
}

double simulate_cost_nonrandomized(const TimeGrid& grid, double x0, double x_bar, const ModelParams& params,
                                   RngSeed seed) {
    validate(grid);
    // Monte Carlo callers reuse the grid, so the discount table is cached per thread.
    thread_local struct {
        double beta = std::numeric_limits<double>::quiet_NaN();
        TimeGrid grid{0.0, 0};
        std::vector<double> table;
    } cache;
    if (cache.beta != params.beta || cache.grid.T != grid.T || cache.grid.N != grid.N) {
        cache.beta = params.beta;
        cache.grid = grid;
        cache.table.resize(grid.N);
        for (std::size_t n = 0; n < grid.N; ++n) cache.table[n] = std::exp(-params.beta * grid.t(n));
    }
    Rng rng(seed.seed, seed.stream, StreamTag::increments);
    const double dt = grid.dt();
    double x = x0;
    double total = 0.0;
    for (std::size_t n = 0; n < grid.N; ++n) {
        const double inc = step_increment(rng, params.mu, params.sigma, dt);
        const double discount = cache.table[n];
        const ReflectedStep s = reflected_step(x, 0.0, discount, dt, x_bar, params.a, params.c, inc);
        total += s.H + s.c + discount * params.c * s.xi_post;
        x = s.x_next;
    }
    return total;
}

double discounted_total_cost(const EpisodeTrace& trace, const ModelParams& params) {
    double total = 0.0;
    for (std::size_t n = 0; n < trace.steps.size(); ++n) {
        const StepRecord& s = trace.steps[n];
        const double jump = s.xi_post - s.xi_pre;
        total += s.H + s.c + std::exp(-params.beta * trace.grid.t(n)) * params.c * jump;
    }
    return total;
}

void write_trace_csv(std::ostream& os, const EpisodeTrace& trace) {
    const auto old_precision = os.precision(17);
    os << "n,t,x_pre,xi_pre,eta_pre,x_post,xi_post,eta_post,H,c\n";
    for (std::size_t n = 0; n < trace.steps.size(); ++n) {
        const StepRecord& s = trace.steps[n];
        os << n << ',' << trace.grid.t(n) << ',' << s.x_pre << ',' << s.xi_pre << ',' << s.eta_pre << ','
           << s.x_post << ',' << s.xi_post << ',' << s.eta_post << ',' << s.H << ',' << s.c << '\n';
    }
    os << "activation_time,";
    if (trace.activated()) os << trace.activation_time;
    else os << "inf";
    os << '\n';
    os.precision(old_precision);
}

} // namespace srl
