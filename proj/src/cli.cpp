#include "fracexp/cli.hpp"

#include "fracexp/applications.hpp"
#include "fracexp/errors.hpp"
#include "fracexp/expformula.hpp"
#include "fracexp/fbm.hpp"
#include "fracexp/parse.hpp"
#include "fracexp/report.hpp"
#include "fracexp/taylor.hpp"

#include "CLI11.hpp"

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

namespace fracexp {

namespace {

struct RunConfig {
    std::string command;
    double hurst = 0.75;
    double r = 0.0;
    std::optional<double> T;
    std::vector<double> grid;
    std::string expr;
    int order = 10;
    std::optional<long> paths;
    std::uint64_t seed = 42;
    int refinement = 1;
    double sigma = 0.5;
    double mu = 0.0;
    double z = 1.0;
    int p_max = 4;
    std::string format = "json";
    std::string output;
};

class IoError : public Error {
public:
    using Error::Error;
};

Json config_json(const RunConfig& c) {
    Json j;
    j["hurst"] = c.hurst;
    if (c.command == "taylor" || c.command == "expform") {
        j["r"] = c.r;
        j["expr"] = c.expr;
    }
    if (c.T) j["T"] = *c.T;
    if (!c.grid.empty()) j["grid"] = c.grid;
    j["order"] = c.order;
    if (c.paths) j["mc"] = {{"paths", *c.paths}, {"seed", c.seed}, {"refinement", c.refinement}};
    if (c.command == "lognormal") {
        j["sigma"] = c.sigma;
        j["mu"] = c.mu;
        j["z"] = c.z;
        j["p_max"] = c.p_max;
    }
    return j;
}

McConfig mc_config(const RunConfig& c, long default_paths) {
    McConfig m;
    m.n_paths = c.paths.value_or(default_paths);
    m.seed = c.seed;
    m.grid_refinement = c.refinement;
    m.validate();
    return m;
}

std::vector<double> sorted_positive(std::vector<double> ts) {
    std::sort(ts.begin(), ts.end());
    ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
    ts.erase(std::remove_if(ts.begin(), ts.end(), [](double t) { return !(t > 0.0); }), ts.end());
    return ts;
}

Json path_samples(const PathView& pv, const std::vector<double>& times) {
    std::vector<double> v;
    for (double t : times) v.push_back(t == 0.0 ? 0.0 : pv.at(t));
    return {{"sample_times", times}, {"sample_values", v}};
}

void check_r(const RunConfig& c, double T) {
    if (!(c.r >= 0.0) || c.r > T) throw DomainError("--r must lie in [0, T]");
}

Json run_taylor(RunConfig& c, HurstParam H) {
    if (c.grid.empty()) throw DomainError("taylor needs --grid");
    if (c.expr.empty()) throw DomainError("taylor needs --expr");
    const TimeGrid grid(c.grid);
    if (c.T && std::fabs(*c.T - grid.T()) > 1e-12 * grid.T()) throw DomainError("--T must equal the last grid time");
    c.T = grid.T();
    check_r(c, grid.T());
    const Expr F = parse(c.expr, ParseContext{grid, std::nullopt});
    const auto terms = backward_taylor_terms(F, c.r, grid, c.order, H);
    std::vector<double> times(grid.times().begin(), grid.times().end());
    times.push_back(c.r);
    const auto shown = [&] {
        auto t = sorted_positive(times);
        t.insert(t.begin(), 0.0);
        return t;
    }();
    const auto ens = simulate(TimeGrid(sorted_positive(times)), mc_config(c, 1), H);
    Json series = Json::array();
    for (long p = 0; p < ens.n_paths(); ++p) {
        const PathView pv = ens.path(p);
        Json s = {{"path", p}};
        s.update(path_samples(pv, shown));
        s.update(to_json(evaluate_series(terms, pv)));
        series.push_back(std::move(s));
    }
    return {{"series", std::move(series)}};
}

double infer_horizon(const RunConfig& c, const Expr& F) {
    if (c.T) return *c.T;
    const auto labels = time_labels(F);
    const double m = labels.empty() ? 0.0 : labels.back();
    if (!(m > 0.0)) throw DomainError("expform needs --T when the expression has no positive time");
    return m;
}

Json run_expform(RunConfig& c, HurstParam H) {
    if (c.expr.empty()) throw DomainError("expform needs --expr");
    ParseContext ctx;
    ctx.horizon = c.T;
    const Expr F = parse(c.expr, ctx);
    const double T = infer_horizon(c, F);
    c.T = T;
    check_r(c, T);
    const ExpSeriesEngine eng(F, c.r, T, H, c.order);
    Json series = Json::array();
    const bool needs_path = c.r > 0.0 && !is_deterministic(freeze(F, c.r));
    if (!needs_path && !c.paths) {
        Json s = {{"path", nullptr}};
        s.update(to_json(eng.evaluate(nullptr)));
        series.push_back(std::move(s));
        return {{"factorized", eng.factorized()}, {"series", std::move(series)}};
    }
    std::vector<double> times = time_labels(F);
    times.push_back(c.r);
    times.push_back(T);
    const auto pos = sorted_positive(times);
    std::vector<double> shown = pos;
    shown.insert(shown.begin(), 0.0);
    const auto ens = simulate(TimeGrid(pos), mc_config(c, 1), H);
    for (long p = 0; p < ens.n_paths(); ++p) {
        const PathView pv = ens.path(p);
        Json s = {{"path", p}};
        s.update(path_samples(pv, shown));
        s.update(to_json(eng.evaluate(&pv)));
        series.push_back(std::move(s));
    }
    return {{"factorized", eng.factorized()}, {"series", std::move(series)}};
}

Json run_merton(RunConfig& c, HurstParam H) {
    if (!c.T) c.T = 1.0;
    return {{"result", to_json(merton_bond_price(*c.T, H, c.order))}};
}

Json run_cir(RunConfig& c, HurstParam H) {
    if (!c.T) c.T = 0.3;
    Json j = {{"expansion", to_json(cir_small_T(*c.T, H))}};
    const auto cfg = mc_config(c, 10000);
    if (cfg.n_paths > 0) j["mc_check"] = to_json(cir_mc_check(*c.T, H, cfg));
    return j;
}

Json run_lognormal(RunConfig& c, HurstParam H) {
    if (!c.T) c.T = 1.0;
    if (c.p_max < 0) throw DomainError("--p-max must be nonnegative");
    Json j = {{"cf_series", to_json(lognormal_cf_series(c.z, *c.T, H, c.sigma, c.mu, c.order))}};
    std::vector<double> p, m, closed;
    for (int k = 0; k <= c.p_max; ++k) {
        p.push_back(k);
        m.push_back(lognormal_moment(k, *c.T, H, c.sigma, c.order));
        closed.push_back(std::exp(0.5 * k * k * std::pow(*c.T, H.two_h()) * c.sigma * c.sigma));
    }
    j["moments"] = {{"p", p}, {"moment", m}, {"closed_form", closed}};
    return j;
}

Json run_simulate(RunConfig& c, HurstParam H, FbmEnsemble& ens) {
    if (c.grid.empty()) throw DomainError("simulate needs --grid");
    ens = simulate(TimeGrid(c.grid), mc_config(c, 10), H);
    return {{"ensemble", to_json(ens)}};
}

std::string output_path(const RunConfig& c) {
    const char* dir = std::getenv("FRACEXP_OUTPUT_DIR");
    const std::string ext = c.format == "table" ? "txt" : c.format;
    if (c.output.empty()) {
        if (!dir || !*dir) return {};
        return (std::filesystem::path(dir) / (c.command + "." + ext)).string();
    }
    std::filesystem::path p(c.output);
    if (p.is_relative() && dir && *dir) p = std::filesystem::path(dir) / p;
    return p.string();
}

void emit(const std::string& text, const RunConfig& c, std::ostream& out) {
    const std::string path = output_path(c);
    if (path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open output file " + path);
    f << text;
    f.close();
    if (!f) throw IoError("failed writing output file " + path);
}

int report_error(std::ostream& err, const char* kind, const std::string& msg, int code) {
    Json j = {{"error", {{"kind", kind}, {"message", msg}, {"exit_code", code}}}};
    err << j.dump() << "\n";
    return code;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
    RunConfig c;
    CLI::App app{"Conditional expectations of fractional Brownian functionals"};
    app.set_config("--config", "", "key=value file merged under the command-line flags");
    app.require_subcommand(1);
    app.fallthrough();

    app.add_option("--hurst", c.hurst, "Hurst index H, 1/2 < H < 1")->capture_default_str();
    app.add_option("--r", c.r, "conditioning time r")->capture_default_str();
    app.add_option("--T", c.T, "horizon T");
    app.add_option("--grid", c.grid, "grid times t1,...,tJ")->delimiter(',');
    app.add_option("--expr", c.expr, "functional, e.g. \"B(0.5)^2*B(1)\"");
    app.add_option("--order", c.order, "series truncation order")->capture_default_str();
    app.add_option("--mc.paths", c.paths, "number of simulated paths");
    app.add_option("--mc.seed", c.seed, "master seed")->capture_default_str();
    app.add_option("--mc.refinement", c.refinement, "grid subdivisions per interval")->capture_default_str();
    app.add_option("--sigma", c.sigma, "volatility (lognormal)")->capture_default_str();
    app.add_option("--mu", c.mu, "log-level shift (lognormal)")->capture_default_str();
    app.add_option("--z", c.z, "characteristic function argument (lognormal)")->capture_default_str();
    app.add_option("--p-max", c.p_max, "highest moment reported (lognormal)")->capture_default_str();
    app.add_option("--format", c.format, "json | csv | table")
        ->check(CLI::IsMember({"json", "csv", "table"}))
        ->capture_default_str();
    app.add_option("--output", c.output, "output file (default stdout or $FRACEXP_OUTPUT_DIR)");

    for (const char* name : {"taylor", "expform", "merton", "cir", "lognormal", "simulate"}) {
        static const std::map<std::string, std::string> help = {
            {"taylor", "backward Taylor expansion on a time grid"},
            {"expform", "exponential-formula series"},
            {"merton", "fractional bond price series"},
            {"cir", "small-T expansion of E[exp(-int B^2)] with a Monte Carlo check"},
            {"lognormal", "characteristic-function series and moments of exp(sigma B_T + mu)"},
            {"simulate", "simulate fBm paths on a grid"},
        };
        app.add_subcommand(name, help.at(name))->callback([&c, name] { c.command = name; });
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp& e) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        return report_error(err, "ConfigError", e.what(), kExitConfig);
    }

    try {
        const HurstParam H(c.hurst);
        Json body;
        FbmEnsemble ens;
        if (c.command == "taylor") body = run_taylor(c, H);
        else if (c.command == "expform") body = run_expform(c, H);
        else if (c.command == "merton") body = run_merton(c, H);
        else if (c.command == "cir") body = run_cir(c, H);
        else if (c.command == "lognormal") body = run_lognormal(c, H);
        else body = run_simulate(c, H, ens);

        Json doc = {{"command", c.command}, {"config", config_json(c)}};
        doc.update(body);
        std::string text;
        if (c.format == "json") text = dump_json(doc);
        else if (c.format == "table") text = render_table(doc);
        else if (c.command == "simulate") {
            std::ostringstream os;
            write_csv(os, ens);
            text = os.str();
        } else text = render_csv(doc);
        emit(text, c, out);
    } catch (const IoError& e) {
        return report_error(err, "IoError", e.what(), kExitIo);
    } catch (const ParseError& e) {
        return report_error(err, "ParseError", e.what(), kExitConfig);
    } catch (const DomainError& e) {
        return report_error(err, "DomainError", e.what(), kExitConfig);
    } catch (const OverflowError& e) {
        return report_error(err, "OverflowError", e.what(), kExitNumerical);
    } catch (const EvalError& e) {
        return report_error(err, "EvalError", e.what(), kExitNumerical);
    } catch (const UnsupportedNode& e) {
        return report_error(err, "UnsupportedNode", e.what(), kExitNumerical);
    } catch (const NumericalError& e) {
        return report_error(err, "NumericalError", e.what(), kExitNumerical);
    }
    return kExitOk;
}

}  // namespace fracexp
