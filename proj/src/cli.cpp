#include "dispatch/cli.hpp"

#include "dispatch/central.hpp"
#include "dispatch/distsim.hpp"
#include "dispatch/errors.hpp"
#include "dispatch/scenario_io.hpp"
#include "dispatch/trace_csv.hpp"

#include <cstdlib>
#include <filesystem>
#include <future>
#include <ostream>
#include <sstream>

namespace dispatch::cli {

namespace {

// DISPATCH_LOG = quiet | info | debug; reports always print, logs are extra.
int log_level() {
    static const int level = [] {
        const char* env = std::getenv("DISPATCH_LOG");
        if (!env) return 1;
        std::string v(env);
        if (v == "quiet") return 0;
        if (v == "debug") return 2;
        return 1;
    }();
    return level;
}

const char* classification_name(DivergenceReport::Classification c) {
    switch (c) {
        case DivergenceReport::Classification::diverging_up:
            return "diverging_up";
        case DivergenceReport::Classification::diverging_down:
            return "diverging_down";
        default:
            return "converged";
    }
}

struct RunSummary {
    double final_t = 0.0;
    double mismatch = 0.0;
    double disagreement = 0.0;
    double lambda_bar = 0.0;
    bool non_finite = false;
    std::string classification = "converged";
    double slope = 0.0;
    double d0_up = 0.0;
};

RunSummary summarize(const SimResult& result) {
    RunSummary s;
    const auto& last = result.trace.blocks.back();
    s.final_t = last.t;
    s.mismatch = last.mismatch;
    s.disagreement = last.disagreement;
    s.lambda_bar = last.lambda_bar();
    s.non_finite = result.non_finite;
    try {
        auto report = detect_divergence(result.trace, result.final_fleet);
        s.classification = classification_name(report.classification);
        s.slope = report.measured_slope;
        s.d0_up = report.d0_up;
    } catch (const analysis_error&) {
        s.classification = "unclassified";
    }
    return s;
}

void print_summary(std::ostream& out, const RunSummary& s, const SimResult& result) {
    out << "final time: " << s.final_t << "\n";
    out << "final mismatch: " << s.mismatch << "\n";
    out << "final disagreement: " << s.disagreement << "\n";
    if (s.non_finite) out << "non-finite prices: the iteration diverged numerically\n";
    out << "divergence classification: " << s.classification << " (measured slope " << s.slope
        << ", analytic up-rate " << s.d0_up << ")\n";
    auto margin = feasibility_margin(result.final_fleet);
    if (margin.feasible() && !s.non_finite) {
        try {
            auto sol = solve_dual_bisection(result.final_fleet, 1e-9);
            out << "|lambda_bar - lambda*|: " << std::abs(s.lambda_bar - sol.lambda_star)
                << "\n";
        } catch (const std::exception&) {
            // Terminal fleet feasible but unsolvable; leave the summary short.
        }
    }
}

}  // namespace

int cmd_check(const std::string& path, std::ostream& out, std::ostream& err) {
    Scenario sc;
    try {
        sc = load_scenario(path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }

    ValidationReport report;
    try {
        report = validate_assumptions(sc.fleet);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    for (const auto& n : report.nodes) {
        out << "node " << n.id << ": " << (n.pass() ? "ok" : "FAIL");
        if (!n.f_strictly_convex) out << " [f not strictly convex]";
        if (!n.phi_convex) out << " [phi not convex]";
        if (!n.phi_slope_below_one) out << " [phi' >= 1 on capacity interval]";
        if (!n.f_slope_positive) out << " [f' <= 0 on capacity interval]";
        out << "\n";
    }
    if (!report.all_pass()) {
        err << "error: standing assumptions violated\n";
        return kExitInvalid;
    }

    auto margin = feasibility_margin(sc.fleet);
    out << "lower slack: " << margin.lower_slack << "\n";
    out << "upper slack: " << margin.upper_slack << "\n";
    if (!margin.feasible()) {
        out << "infeasible\n";
        return kExitInfeasible;
    }
    out << "feasible\n";
    return kExitOk;
}

int cmd_solve(const std::string& path, double tol, std::ostream& out, std::ostream& err) {
    Scenario sc;
    try {
        sc = load_scenario(path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }

    DualSolution sol;
    try {
        sol = solve_dual_bisection(sc.fleet, tol);
    } catch (const infeasibility_error& e) {
        err << "infeasible: " << e.what() << "\n";
        return kExitInfeasible;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }

    out << "lambda*: " << sol.lambda_star << "\n";
    std::size_t i = 0;
    for (const auto& n : sc.fleet.nodes()) out << "x*[" << n.id << "]: " << sol.x_star[i++] << "\n";
    out << "total cost: " << sol.cost << "\n";
    out << "mismatch: " << sol.mismatch << "\n";

    auto kkt = verify_kkt(sc.fleet, sol.x_star, sol.lambda_star, 1e-7);
    out << "kkt primal feasibility: " << (kkt.primal_feasible ? "pass" : "fail") << "\n";
    out << "kkt multiplier sign: " << (kkt.multiplier_nonnegative ? "pass" : "fail") << "\n";
    out << "kkt relaxed balance: " << (kkt.relaxed_constraint ? "pass" : "fail") << "\n";
    out << "kkt complementary slackness: " << (kkt.complementary_slackness ? "pass" : "fail")
        << "\n";
    out << "kkt minimizer condition: " << (kkt.minimizer_condition ? "pass" : "fail") << "\n";
    return kExitOk;
}

int cmd_simulate(const std::string& path, const std::string& out_csv, bool summary,
                 std::ostream& out, std::ostream& err) {
    Scenario sc;
    try {
        sc = load_scenario(path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    if (!sc.topology || !sc.sim) {
        err << "error: simulate requires 'topology' and 'sim' sections\n";
        return kExitInvalid;
    }

    SimResult result{Trace{}, Fleet{}, Topology::build({}, {}), {}, false};
    try {
        result = run(sc.fleet, *sc.topology, *sc.sim, sc.events);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    if (log_level() >= 2)
        err << "debug: " << result.trace.blocks.size() << " trace blocks recorded\n";

    if (!out_csv.empty()) {
        try {
            write_trace_csv(out_csv, result.trace);
        } catch (const std::exception& e) {
            err << "error: " << e.what() << "\n";
            return kExitInvalid;
        }
        if (log_level() >= 1) err << "trace written to " << out_csv << "\n";
    }
    if (summary) print_summary(out, summarize(result), result);
    return kExitOk;
}

int cmd_sweep(const std::string& path, const std::string& param,
              const std::vector<double>& values, const std::string& out_dir, std::ostream& out,
              std::ostream& err) {
    if (param != "k" && param != "T") {
        err << "error: sweep parameter must be 'k' or 'T'\n";
        return kExitInvalid;
    }
    if (values.empty()) {
        err << "error: sweep needs at least one value\n";
        return kExitInvalid;
    }

    Scenario sc;
    try {
        sc = load_scenario(path);
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitInvalid;
    }
    if (!sc.topology || !sc.sim) {
        err << "error: sweep requires 'topology' and 'sim' sections\n";
        return kExitInvalid;
    }
    if (!out_dir.empty()) {
        std::error_code ec;
        std::filesystem::create_directories(out_dir, ec);
        if (ec) {
            err << "error: cannot create " << out_dir << "\n";
            return kExitInvalid;
        }
    }

    struct SweepOutcome {
        RunSummary summary;
        std::string error;
    };
    // Runs share nothing mutable; each future owns a scenario copy.
    std::vector<std::future<SweepOutcome>> futures;
    for (double value : values) {
        futures.push_back(std::async(std::launch::async, [=, &sc]() -> SweepOutcome {
            SimConfig cfg = *sc.sim;
            if (param == "k")
                cfg.k = value;
            else
                cfg.T = value;
            try {
                auto result = run(sc.fleet, *sc.topology, cfg, sc.events);
                if (!out_dir.empty()) {
                    std::ostringstream name;
                    name << out_dir << "/sweep_" << param << "_" << value << ".csv";
                    write_trace_csv(name.str(), result.trace);
                }
                return {summarize(result), ""};
            } catch (const std::exception& e) {
                return {{}, e.what()};
            }
        }));
    }

    bool any_invalid = false;
    for (std::size_t i = 0; i < futures.size(); ++i) {
        auto outcome = futures[i].get();
        out << param << "=" << values[i] << ": ";
        if (!outcome.error.empty()) {
            out << "error: " << outcome.error << "\n";
            any_invalid = true;
            continue;
        }
        const auto& s = outcome.summary;
        out << "mismatch=" << s.mismatch << " disagreement=" << s.disagreement
            << " classification=" << s.classification;
        if (s.non_finite) out << " non_finite";
        out << "\n";
    }
    return any_invalid ? kExitInvalid : kExitOk;
}

}  // namespace dispatch::cli
