#include "amm/cli.hpp"

#include "amm/closed_form.hpp"
#include "amm/errors.hpp"
#include "amm/learner.hpp"
#include "amm/measure.hpp"
#include "amm/menu_io.hpp"
#include "amm/polygon.hpp"
#include "amm/run_config.hpp"
#include "amm/transport.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdarg>
#include <cstdio>
#include <fstream>
#include <map>
#include <ostream>

namespace amm {

namespace {

std::string fmt(const char* format, ...) {
    char buf[512];
    va_list ap;
    va_start(ap, format);
    std::vsnprintf(buf, sizeof buf, format, ap);
    va_end(ap);
    return buf;
}

// Options that may also come from a config file. Flags that were given on
// the command line override file values.
class KeyOptions {
public:
    KeyOptions(CLI::App* app, std::initializer_list<const char*> keys) {
        app->add_option("--config", config_path_, "flat key=value config file");
        for (const char* key : keys) {
            auto* opt = app->add_option(std::string("--") + key, values_[key]);
            options_[key] = opt;
        }
    }

    RunConfig resolve() const {
        RunConfig cfg;
        if (!config_path_.empty()) cfg = RunConfig::from_file(config_path_);
        RunConfig flags;
        for (const auto& [key, opt] : options_) {
            if (opt->count() > 0) flags.set(key, values_.at(key));
        }
        cfg.merge(flags);
        return cfg;
    }

private:
    std::string config_path_;
    std::map<std::string, std::string> values_;
    std::map<std::string, CLI::Option*> options_;
};

std::vector<double> belief_for(const RunConfig& cfg, std::size_t dim) {
    std::vector<double> c = cfg.get_vector("c", std::vector<double>(dim, 0.5));
    if (c.size() == 1 && dim > 1) c.assign(dim, c.front());
    if (c.size() != dim) throw ValidationError("--c must have one entry per good");
    return c;
}

void report_feasibility(std::ostream& out, const FeasibilityReport& f) {
    out << "alloc_bounds " << (f.alloc_bounds_ok ? "ok" : "fail") << '\n';
    out << "no_trade_item " << (f.has_no_trade ? "ok" : "fail") << '\n';
    out << "zero_utility_at_belief " << (f.zero_utility_at_belief ? "ok" : "fail")
        << fmt(" (max gain %.9g)", f.max_gain_at_belief) << '\n';
}

double separate_baseline(const std::vector<double>& c, double lambda) {
    double total = 0.0;
    for (double ck : c) total += profit_1d(ck, lambda);
    return total;
}

struct ClosedFormArgs {
    std::string family;
};

int cmd_closed_form(const ClosedFormArgs& args, const RunConfig& cfg, std::ostream& out) {
    const double lambda = cfg.get_double("lambda", 1.0);
    Menu menu;
    double profit = 0.0;
    std::string label;
    if (args.family == "bidask1d") {
        const double c = belief_for(cfg, 1).front();
        menu = bid_ask_1d(c, lambda);
        profit = profit_1d(c, lambda);
        label = fmt("bid/ask, c=%.9g lambda=%.9g", c, lambda);
    } else if (args.family == "symmetric2d") {
        menu = symmetric_2d_menu(lambda);
        profit = symmetric_cost_closed_form(lambda);
        label = fmt("symmetric two-good, lambda=%.9g", lambda);
    } else if (args.family == "offcenter") {
        if (cfg.has("lambda") && lambda != 1.0) throw ValidationError("offcenter family is defined for lambda = 1 only");
        menu = offcenter_menu();
        profit = exact_profit_uniform_2d(menu, UpdateModel({1.0 / 3.0, 1.0 / 3.0}, 1.0));
        label = "off-centre two-good, c=(1/3,1/3) lambda=1";
    } else if (args.family == "separate") {
        const std::vector<double> c = belief_for(cfg, cfg.get_size("d", 2));
        menu = separate_pricing_menu(c, lambda);
        profit = separate_baseline(c, lambda);
        label = fmt("separate pricing, lambda=%.9g", lambda);
    } else {
        throw ValidationError("unknown family '" + args.family + "' (bidask1d, symmetric2d, offcenter, separate)");
    }
    const std::string comment = label + fmt("; profit %.9g", profit);
    if (const auto path = cfg.raw("out")) {
        write_menu_file(*path, menu, comment);
        out << "family " << args.family << '\n' << fmt("profit %.9g\n", profit) << "wrote " << *path << '\n';
    } else {
        write_menu(out, menu, comment);
    }
    return kExitOk;
}

struct EvalArgs {
    std::string menu;
    std::size_t n = 1'000'000;
};

int cmd_eval(const EvalArgs& args, const RunConfig& cfg, std::ostream& out) {
    const Menu menu = read_menu_file(args.menu);
    const auto dist = ValuationDistribution::parse(cfg.get_string("dist", "uniform"), menu.dim());
    const UpdateModel upd(belief_for(cfg, menu.dim()), cfg.get_double("lambda", 1.0));
    const McEstimate mc = expected_profit_mc(menu, dist, upd, args.n, cfg.get_u64("seed", 0));
    out << fmt("profit %.9g\nstd_error %.9g\nsamples %zu\n", mc.mean, mc.std_error, mc.samples);
    report_feasibility(out, check_feasibility(menu, upd));
    if (std::holds_alternative<UniformLaw>(dist.law())) {
        const double base = separate_baseline(upd.belief, upd.lambda);
        out << fmt("separate_baseline %.9g\n", base);
        out << "exceeds_baseline " << (mc.mean - 4.0 * mc.std_error > base ? "yes" : "no") << '\n';
    }
    return kExitOk;
}

struct TrainArgs {
    std::string resume;
    std::string schedule = "constant";
    std::size_t log_every = 500;
    std::size_t log_samples = 1'000'000;
};

LearnerConfig learner_config(const RunConfig& cfg, const TrainArgs& args) {
    LearnerConfig lc;
    lc.dist = cfg.get_string("dist", lc.dist);
    lc.dim = cfg.get_size("d", lc.dim);
    lc.lambda = cfg.get_double("lambda", lc.lambda);
    lc.belief = belief_for(cfg, lc.dim);
    lc.menu_size = cfg.get_size("menu_size", lc.menu_size);
    lc.temperature = cfg.get_double("temp", lc.temperature);
    lc.learning_rate = cfg.get_double("lr", lc.learning_rate);
    lc.batch_size = cfg.get_size("batch", lc.batch_size);
    lc.steps = cfg.get_size("steps", lc.steps);
    lc.seed = cfg.get_u64("seed", lc.seed);
    lc.schedule = args.schedule;
    lc.log_every = args.log_every;
    lc.log_samples = args.log_samples;
    lc.validate();
    return lc;
}

int cmd_train(const TrainArgs& args, const RunConfig& cfg, std::ostream& out) {
    LearnerConfig lc = learner_config(cfg, args);
    const std::string prefix = cfg.get_string("out", "mmopt_train");
    TrainResult result;
    if (args.resume.empty()) {
        result = train(lc);
    } else {
        const LearnerParams start = read_checkpoint(args.resume);
        if (!cfg.has("menu_size")) lc.menu_size = start.size;
        result = train(lc, start);
    }

    write_checkpoint(prefix + ".ckpt", result.params);
    ExtractOptions eo;
    eo.grid_resolution = cfg.get_size("grid", eo.grid_resolution);
    const Menu menu = extract_menu(result.params, eo);
    write_menu_file(prefix + ".menu", menu, "extracted menu, " + lc.dist);
    {
        std::ofstream log(prefix + ".log.csv");
        if (!log) throw ValidationError("cannot write " + prefix + ".log.csv");
        result.log.write_csv(log);
    }
    const LogEntry& last = result.log.entries.back();
    out << fmt("final_step %zu\nsoft_objective %.9g\nhard_profit %.9g\nhard_se %.9g\n", last.step,
               last.soft_objective, last.hard_profit, last.hard_se);
    out << "extracted_items " << menu.size() << '\n';
    report_feasibility(out, check_feasibility(menu, lc.update_model()));
    out << "wrote " << prefix << ".ckpt " << prefix << ".menu " << prefix << ".log.csv\n";
    return kExitOk;
}

struct CertifyArgs {
    std::string menu;
    std::string family;
    std::size_t n = 1'000'000;
};

int cmd_certify(const CertifyArgs& args, const RunConfig& cfg, std::ostream& out) {
    const double lambda = cfg.get_double("lambda", 1.0);
    Menu menu;
    std::string family = args.family;
    if (!args.menu.empty()) {
        menu = read_menu_file(args.menu);
        if (family.empty()) family = menu.dim() == 1 ? "bidask1d" : "symmetric2d";
    }
    TransportCertificate cert;
    UpdateModel upd;
    if (family == "bidask1d") {
        const double c = belief_for(cfg, 1).front();
        cert = certificate_1d(c, lambda);
        upd = UpdateModel({c}, lambda);
        if (args.menu.empty()) menu = bid_ask_1d(c, lambda);
    } else if (family == "symmetric2d") {
        cert = transport_cost_2d(lambda);
        upd = UpdateModel({0.5, 0.5}, lambda);
        if (args.menu.empty()) menu = symmetric_2d_menu(lambda);
    } else if (family == "offcenter") {
        if (cfg.has("lambda") && lambda != 1.0) throw ValidationError("offcenter certificate is defined for lambda = 1 only");
        cert = offcenter_certificate();
        upd = UpdateModel({1.0 / 3.0, 1.0 / 3.0}, 1.0);
        if (args.menu.empty()) menu = offcenter_menu();
    } else {
        throw ValidationError("unknown certificate family '" + family + "' (bidask1d, symmetric2d, offcenter)");
    }
    if (menu.dim() != upd.dim()) throw ValidationError("menu dimension does not match the certificate");
    const auto dist = ValuationDistribution(menu.dim(), UniformLaw{});
    const DualityReport rep = duality_gap(menu, cert.total, dist, upd, args.n, cfg.get_u64("seed", 0));
    out << "certificate " << to_string(cert.kind) << '\n';
    out << fmt("profit %.9g\nstd_error %.9g\ncost %.9g\ngap %.9g\n", rep.profit, rep.profit_se, rep.cost, rep.gap);
    out << "weak_duality " << (rep.weak_duality_ok ? "pass" : "fail") << '\n';
    out << "verdict " << (rep.certified ? "certified-optimal" : "not-certified") << '\n';
    return kExitOk;
}

struct HeatmapArgs {
    std::string menu;
    std::string slice;
};

int cmd_heatmap(const HeatmapArgs& args, const RunConfig& cfg, std::ostream& out) {
    const Menu menu = read_menu_file(args.menu);
    const std::size_t r = cfg.get_size("grid", 101);
    if (r < 2) throw ValidationError("grid resolution must be at least 2");
    std::vector<GridCell> cells;
    if (menu.dim() <= 2) {
        if (!args.slice.empty()) throw ValidationError("--slice applies to three-good menus only");
        cells = utility_grid(menu, r);
    } else if (menu.dim() == 3) {
        if (args.slice.empty()) throw ValidationError("three-good menus need --slice k=v");
        const auto eq = args.slice.find('=');
        if (eq == std::string::npos) throw ValidationError("--slice expects k=v, e.g. x3=0.5");
        std::string axis = args.slice.substr(0, eq);
        if (!axis.empty() && axis.front() == 'x') axis.erase(0, 1);
        if (axis != "1" && axis != "2" && axis != "3") throw ValidationError("--slice axis must be 1, 2 or 3");
        cells = utility_grid_slice(menu, r, static_cast<std::size_t>(axis[0] - '1'), parse_real(args.slice.substr(eq + 1)));
    } else {
        throw ValidationError("heatmaps support up to three goods");
    }

    std::string csv = "x1,x2,item,alloc1,alloc2,payment,utility\n";
    for (const auto& cell : cells) {
        const bool two = cell.point.size() > 1;
        csv += fmt("%.9g,%.9g,%zu,%.9g,%.9g,%.9g,%.9g\n", cell.point[0], two ? cell.point[1] : 0.0, cell.index,
                   cell.alloc[0], two ? cell.alloc[1] : 0.0, cell.payment, cell.utility);
    }
    if (const auto path = cfg.raw("out")) {
        std::ofstream file(*path, std::ios::binary);
        if (!file) throw ValidationError("cannot write " + *path);
        file << csv;
        if (!file) throw ValidationError("failed writing " + *path);
        out << "wrote " << cells.size() << " cells to " << *path << '\n';
    } else {
        out << csv;
    }
    return kExitOk;
}

struct MeasureArgs {
    std::string menu;
    std::size_t n = 1'000'000;
};

int cmd_measure(const MeasureArgs& args, const RunConfig& cfg, std::ostream& out) {
    std::size_t d = cfg.get_size("d", 2);
    Menu menu;
    if (!args.menu.empty()) {
        menu = read_menu_file(args.menu);
        d = menu.dim();
    }
    const auto dist = ValuationDistribution::parse(cfg.get_string("dist", "uniform"), d);
    const UpdateModel upd(belief_for(cfg, d), cfg.get_double("lambda", 1.0));
    const SignedMeasure mu = build_measure(dist, upd);
    const MeasureMasses m = component_masses(mu);
    out << fmt("interior %.9g\n", m.interior);
    for (std::size_t i = 0; i < mu.faces.size(); ++i) {
        out << fmt("face x%zu=%d %.9g\n", mu.faces[i].axis + 1, mu.faces[i].side, m.faces[i]);
    }
    out << fmt("points %.9g\ntotal %.9g\n", m.points, m.total);
    if (!args.menu.empty()) {
        const LinearizationCheck chk = linearization_residual(menu, dist, upd, args.n, cfg.get_u64("seed", 0));
        out << fmt("integral_u %.9g\nmc_profit %.9g\nresidual %.9g\ncombined_se %.9g\n", chk.integral, chk.profit,
                   chk.residual, chk.combined_se);
    }
    return kExitOk;
}

int cmd_compare(const std::vector<double>& lambdas, std::ostream& out) {
    out << "lambda,optimal,separate,absolute,relative\n";
    for (double lam : lambdas) {
        const ProfitGap g = profit_gap_2d(lam);
        out << fmt("%.9g,%.9g,%.9g,%.9g,%.9g\n", lam, g.optimal, g.separate, g.absolute, g.relative);
    }
    return kExitOk;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Design, evaluate and certify multi-good market-maker menus", "mmopt"};
    app.require_subcommand(1);

    ClosedFormArgs cf;
    auto* cf_cmd = app.add_subcommand("closed-form", "write a closed-form menu and print its profit");
    cf_cmd->add_option("family", cf.family, "bidask1d | symmetric2d | offcenter | separate")->required();
    KeyOptions cf_keys(cf_cmd, {"lambda", "c", "d", "out"});

    EvalArgs ev;
    auto* ev_cmd = app.add_subcommand("eval", "Monte Carlo profit and feasibility of a menu file");
    ev_cmd->add_option("--menu", ev.menu, "menu file")->required();
    ev_cmd->add_option("--n", ev.n, "Monte Carlo samples")->check(CLI::PositiveNumber);
    KeyOptions ev_keys(ev_cmd, {"dist", "lambda", "c", "seed"});

    TrainArgs tr;
    auto* tr_cmd = app.add_subcommand("train", "train a menu with the softmax surrogate");
    tr_cmd->add_option("--resume", tr.resume, "checkpoint to continue from (path given to --out earlier, plus .ckpt)");
    tr_cmd->add_option("--schedule", tr.schedule, "learning-rate schedule: constant | cosine");
    tr_cmd->add_option("--log-every", tr.log_every, "steps between log entries");
    tr_cmd->add_option("--log-samples", tr.log_samples, "Monte Carlo samples per log entry");
    KeyOptions tr_keys(tr_cmd, {"dist", "d", "lambda", "c", "menu_size", "temp", "lr", "batch", "steps", "seed",
                                "grid", "out"});

    CertifyArgs ce;
    auto* ce_cmd = app.add_subcommand("certify", "compare menu profit with a transport certificate");
    ce_cmd->add_option("--menu", ce.menu, "menu file (defaults to the family's closed-form menu)");
    ce_cmd->add_option("--family", ce.family, "bidask1d | symmetric2d | offcenter");
    ce_cmd->add_option("--n", ce.n, "Monte Carlo samples")->check(CLI::PositiveNumber);
    KeyOptions ce_keys(ce_cmd, {"lambda", "c", "seed"});

    HeatmapArgs hm;
    auto* hm_cmd = app.add_subcommand("heatmap", "export the choice grid of a menu as CSV");
    hm_cmd->add_option("--menu", hm.menu, "menu file")->required();
    hm_cmd->add_option("--slice", hm.slice, "pinned coordinate for three goods, e.g. x3=0.5");
    KeyOptions hm_keys(hm_cmd, {"grid", "out"});

    MeasureArgs me;
    auto* me_cmd = app.add_subcommand("measure", "component masses of the transformed measure");
    me_cmd->add_option("--menu", me.menu, "optional menu for the linearization check");
    me_cmd->add_option("--n", me.n, "Monte Carlo samples for the check")->check(CLI::PositiveNumber);
    KeyOptions me_keys(me_cmd, {"dist", "d", "lambda", "c", "seed"});

    std::vector<double> lambdas{0.0, 0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0, std::sqrt(2.0) / 3.0};
    auto* cmp_cmd = app.add_subcommand("compare", "optimal versus separate pricing profit, two uniform goods");
    cmp_cmd->add_option("--lambda", lambdas, "lambda values")->delimiter(',');

    try {
        app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitValidation;
    }

    try {
        if (cf_cmd->parsed()) return cmd_closed_form(cf, cf_keys.resolve(), out);
        if (ev_cmd->parsed()) return cmd_eval(ev, ev_keys.resolve(), out);
        if (tr_cmd->parsed()) return cmd_train(tr, tr_keys.resolve(), out);
        if (ce_cmd->parsed()) return cmd_certify(ce, ce_keys.resolve(), out);
        if (hm_cmd->parsed()) return cmd_heatmap(hm, hm_keys.resolve(), out);
        if (me_cmd->parsed()) return cmd_measure(me, me_keys.resolve(), out);
        if (cmp_cmd->parsed()) return cmd_compare(lambdas, out);
    } catch (const ValidationError& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const NumericalError& e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitValidation;
    }
    return kExitValidation;
}

}  // namespace amm
