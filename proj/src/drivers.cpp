#include "chnsd/drivers.hpp"

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <iostream>

namespace chnsd {

namespace fs = std::filesystem;

Problem make_problem(const Config& cfg, bool mms_mode) {
    Problem p;
    p.mesh = std::make_unique<Mesh>(build_layered_mesh(cfg.nx, cfg.ny, cfg.layout));
    p.spaces = std::make_unique<Spaces>(make_spaces(*p.mesh, mms_mode));
    return p;
}

DiscreteField initial_phase(const Config& cfg, const Spaces& spaces) {
    const InitialCondition& ic = cfg.initial;
    const DomainLayout& lay = cfg.layout;
    const double eps = cfg.model.epsilon;
    const double sqrt2eps = std::sqrt(2.0) * eps;

    if (ic.kind != InitKind::uniform) {
        const double reach = ic.kind == InitKind::circle_bubble ? ic.radius : ic.half_width;
        if (ic.center.x() - reach < lay.x_min || ic.center.x() + reach > lay.x_max ||
            ic.center.y() - reach < lay.y_min || ic.center.y() + reach > lay.y_max)
            throw ConfigError("initial bubble extends outside the domain");
    }

    switch (ic.kind) {
    case InitKind::uniform:
        return interpolate(spaces.Y, [&](const Vec2&) { return ic.phi0; });
    case InitKind::circle_bubble:
        return interpolate(spaces.Y, [&](const Vec2& x) {
            const double r = (x - ic.center).norm();
            return std::tanh((ic.radius - r) / sqrt2eps);
        });
    case InitKind::square_bubble:
        return interpolate(spaces.Y, [&](const Vec2& x) {
            const double d = ic.half_width - std::max(std::abs(x.x() - ic.center.x()), std::abs(x.y() - ic.center.y()));
            return std::tanh(d / sqrt2eps);
        });
    }
    throw ConfigError("unreachable initial kind");
}

SimState initial_state(const Config& cfg, const Spaces& spaces) {
    SimState st = make_state(spaces);
    st.phi = initial_phase(cfg, spaces);
    return st;
}

std::vector<EnergyRecord> run_time_loop(const Problem& problem, const Config& cfg, SimState& state, int n_steps,
                                        const SchemeForcing* forcing, const StepCallback& on_step) {
    std::vector<EnergyRecord> records;
    records.push_back(make_record(nullptr, state, cfg.model, cfg.scheme, cfg.scheme.scheme));

    if (cfg.scheme.scheme == SchemeKind::decoupled) {
        DecoupledStepper stepper(*problem.spaces, cfg.model, cfg.scheme);
        for (int n = 0; n < n_steps; ++n) {
            StepReport rep;
            SimState next = stepper.advance(state, forcing, &rep);
            records.push_back(make_record(&state, next, cfg.model, cfg.scheme, SchemeKind::decoupled));
            state = std::move(next);
            if (on_step) on_step(n + 1, state, rep);
        }
    } else {
        CoupledStepper stepper(*problem.spaces, cfg.model, cfg.scheme);
        for (int n = 0; n < n_steps; ++n) {
            StepReport rep;
            SimState next = stepper.advance(state, forcing, &rep);
            records.push_back(make_record(&state, next, cfg.model, cfg.scheme, SchemeKind::coupled));
            state = std::move(next);
            if (on_step) on_step(n + 1, state, rep);
        }
    }
    return records;
}

namespace {

int step_count(const SchemeParams& p) { return static_cast<int>(std::floor(p.T / p.dt + 1e-9)); }

void require_mms_geometry(const Config& cfg) {
    const DomainLayout& l = cfg.layout;
    const bool ok = l.x_min == 0.0 && l.x_max == 1.0 && l.y_min == 0.0 && l.y_max == 2.0 && l.y_interface == 1.0 &&
                    l.conduit_position == ConduitPosition::top;
    if (!ok)
        throw ConfigError("convergence modes use the manufactured solution on [0,1]x[0,2] with the conduit on top");
}

} // namespace

SpaceConvergenceResult run_converge_space(const Config& cfg, const std::vector<int>& cells_per_unit) {
    require_mms_geometry(cfg);
    SpaceConvergenceResult res;
    res.table.step_label = "h";
    res.table.field_names = mms_error_names();

    for (int n : cells_per_unit) {
        Config level = cfg;
        level.nx = n;
        level.ny = 2 * n;
        Problem problem = make_problem(level, true);
        const ExactSolution exact{level.model};
        const SchemeForcing forcing = make_mms_forcing(*problem.spaces, exact);
        SimState state = mms_initial_state(*problem.spaces, exact, 0.0);
        const int steps = step_count(level.scheme);

        if (level.scheme.scheme == SchemeKind::decoupled) {
            DecoupledStepper stepper(*problem.spaces, level.model, level.scheme);
            for (int k = 0; k < steps; ++k) state = stepper.advance(state, &forcing);
        } else {
            CoupledStepper stepper(*problem.spaces, level.model, level.scheme);
            for (int k = 0; k < steps; ++k) state = stepper.advance(state, &forcing);
        }

        res.table.steps.push_back(1.0 / n);
        res.table.errors.push_back(mms_errors(state, exact, state.t));
    }
    return res;
}

TimeConvergenceResult run_converge_time(const Config& cfg, int levels) {
    require_mms_geometry(cfg);
    Config base = cfg;
    if (base.nx != 32) {
        base.nx = 32;
        base.ny = 64;
    }
    Problem problem = make_problem(base, true);
    const ExactSolution exact{base.model};
    const SchemeForcing forcing = make_mms_forcing(*problem.spaces, exact);

    std::vector<SimState> finals;
    std::vector<double> dts;
    for (int k = 0; k < levels; ++k) {
        Config level = base;
        level.scheme.dt = base.scheme.dt / std::pow(2.0, k);
        SimState state = mms_initial_state(*problem.spaces, exact, 0.0);
        const int steps = step_count(level.scheme);
        if (level.scheme.scheme == SchemeKind::decoupled) {
            DecoupledStepper stepper(*problem.spaces, level.model, level.scheme);
            for (int n = 0; n < steps; ++n) state = stepper.advance(state, &forcing);
        } else {
            CoupledStepper stepper(*problem.spaces, level.model, level.scheme);
            for (int n = 0; n < steps; ++n) state = stepper.advance(state, &forcing);
        }
        finals.push_back(std::move(state));
        dts.push_back(level.scheme.dt);
    }

    TimeConvergenceResult res;
    res.table.step_label = "dt";
    res.table.field_names = {"phi_L2", "pm_L2", "uc_L2"};
    for (int k = 0; k + 1 < levels; ++k) {
        res.table.steps.push_back(dts[k]);
        res.table.errors.push_back({l2_diff(finals[k].phi, finals[k + 1].phi),
                                    l2_diff(finals[k].p_m, finals[k + 1].p_m),
                                    l2_diff(finals[k].u_c, finals[k + 1].u_c)});
    }
    return res;
}

std::uint64_t hash_bytes(const double* data, std::size_t n, std::uint64_t seed) {
    std::uint64_t h = seed;
    const unsigned char* bytes = reinterpret_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n * sizeof(double); ++i) {
        h ^= bytes[i];
        h *= 1099511628211ull;
    }
    return h;
}

namespace {

std::uint64_t hash_inputs(const Problem& problem, const SimState& st, const Config& cfg) {
    std::uint64_t h = 1469598103934665603ull;
    for (const Vec2& p : problem.mesh->nodes) h = hash_bytes(p.data(), 2, h);
    h = hash_bytes(st.phi.coeffs.data(), st.phi.coeffs.size(), h);
    h = hash_bytes(st.u_c.coeffs.data(), st.u_c.coeffs.size(), h);
    const double params[] = {cfg.model.rho1, cfg.model.rho2,  cfg.model.nu1,     cfg.model.nu2,
                             cfg.model.M_c,  cfg.model.M_m,   cfg.model.gamma,   cfg.model.epsilon,
                             cfg.scheme.dt,  cfg.scheme.beta, cfg.scheme.xi,     cfg.scheme.rel_tol,
                             cfg.model.K(0, 0), cfg.model.K(1, 1), cfg.model.alpha_bjs};
    return hash_bytes(params, sizeof(params) / sizeof(double), h);
}

} // namespace

CompareResult run_compare_schemes(const Config& cfg) {
    CompareResult out;
    Config dec = cfg;
    dec.scheme.scheme = SchemeKind::decoupled;
    Config cpl = cfg;
    cpl.scheme.scheme = SchemeKind::coupled;

    Problem problem = make_problem(cfg, false);
    SimState s_dec = initial_state(dec, *problem.spaces);
    SimState s_cpl = initial_state(cpl, *problem.spaces);
    if (hash_inputs(problem, s_dec, dec) != hash_inputs(problem, s_cpl, cpl))
        throw ConfigError("compare_schemes: the two runs do not share identical inputs");

    const int steps = step_count(cfg.scheme);
    out.decoupled = run_time_loop(problem, dec, s_dec, steps);
    out.coupled = run_time_loop(problem, cpl, s_cpl, steps);
    out.phi_l2_difference = l2_diff(s_dec.phi, s_cpl.phi);
    return out;
}

void run_experiment(const Config& cfg) {
    const fs::path dir = cfg.output.directory;
    fs::create_directories(dir);

    switch (cfg.mode) {
    case RunMode::run: {
        Problem problem = make_problem(cfg, false);
        SimState state = initial_state(cfg, *problem.spaces);
        write_vtk(state, *problem.mesh, (dir / "snapshot_000000.vtk").string());
        const int steps = step_count(cfg.scheme);
        const int every = cfg.output.vtk_every;
        auto records = run_time_loop(problem, cfg, state, steps, nullptr,
                                     [&](int n, const SimState& s, const StepReport&) {
                                         if (every > 0 && (n % every == 0 || n == steps)) {
                                             char name[64];
                                             std::snprintf(name, sizeof name, "snapshot_%06d.vtk", n);
                                             write_vtk(s, *problem.mesh, (dir / name).string());
                                         }
                                     });
        write_energy_csv(records, (dir / cfg.output.energy_csv).string());
        break;
    }
    case RunMode::converge_space: {
        const auto res = run_converge_space(cfg);
        std::ofstream os(dir / "convergence_space.csv");
        if (!os) throw IoError("cannot write convergence_space.csv");
        os << res.table.to_csv();
        std::cout << res.table.to_csv();
        break;
    }
    case RunMode::converge_time: {
        const auto res = run_converge_time(cfg);
        std::ofstream os(dir / "convergence_time.csv");
        if (!os) throw IoError("cannot write convergence_time.csv");
        os << res.table.to_csv();
        std::cout << res.table.to_csv();
        break;
    }
    case RunMode::compare_schemes: {
        const auto res = run_compare_schemes(cfg);
        write_energy_csv(res.decoupled, (dir / "energy_decoupled.csv").string());
        write_energy_csv(res.coupled, (dir / "energy_coupled.csv").string());
        std::ofstream os(dir / "compare_schemes.csv");
        if (!os) throw IoError("cannot write compare_schemes.csv");
        char buf[64];
        std::snprintf(buf, sizeof buf, "%.17g", res.phi_l2_difference);
        os << "phi_l2_difference\n" << buf << "\n";
        std::cout << "phi L2 difference (decoupled vs coupled) at T: " << buf << "\n";
        break;
    }
    }
}

} // namespace chnsd
