// Command-line front end: construct codes, analyze their cycle structure,
// run channel sweeps and threshold estimates, and verify the built-in
// quantitative suites.
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "eprldpc/construction.hpp"
#include "eprldpc/sim.hpp"
#include "eprldpc/verify.hpp"

using namespace eprldpc;

namespace {

int cmd_construct(const ConstructionConfig& cfg, const std::string& out_path, const std::string& mode) {
    auto code = optimize_code(cfg);
    auto spec = make_code_spec(code);
    spec.default_mode = mode == "extended" ? TransmitMode::extended : TransmitMode::base;
    write_qalist(spec, out_path);
    std::cout << "wrote " << out_path << "\n" << code.report.to_string();
    std::ofstream rep(out_path + ".report.txt");
    rep << code.report.to_string();
    return 0;
}

int cmd_analyze(const std::string& in_path, int cap, long long p4_trials, uint64_t seed) {
    auto spec = read_qalist(in_path);
    std::cout << "p=" << spec.ctx->p() << " q=" << spec.ctx->q() << " N=" << spec.n_sym()
              << " M=" << spec.h.n_chk << " rate=" << spec.rate() << " m_s=" << spec.m_s() << "\n";
    auto mother_rep = girth(spec.img.mother(), cap);
    std::cout << "mother:   " << mother_rep.summary() << "\n";
    auto omega_rep = girth(spec.omega.matrix, cap);
    std::cout << "extended: " << omega_rep.summary() << "\n";
    auto epr_rep = girth(spec.omega_e.matrix, cap);
    std::cout << "emitted:  " << epr_rep.summary() << "\n";
    auto dd = degree_distributions(spec.omega_e.matrix);
    std::cout << "lambda:";
    for (const auto& [d, f] : dd.lambda) std::printf(" %.4f*x^%d", f, d - 1);
    std::cout << "\nrho:   ";
    for (const auto& [d, f] : dd.rho) std::printf(" %.4f*x^%d", f, d - 1);
    std::cout << "\n";
    auto est = estimate_p4(*spec.ctx, p4_trials, seed);
    std::printf("length-4 cycle probability: %.5f +- %.5f (1/(q-1) = %.5f)\n", est.estimate, est.std_error,
                1.0 / (spec.ctx->q() - 1));
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"construction, analysis and simulation of extended binary representations of non-binary codes"};
    app.set_config("--config", "", "key=value configuration under a [subcommand] section; flags override");
    app.fallthrough();
    app.require_subcommand(1);

    // construct
    auto* c = app.add_subcommand("construct", "build a code and write a qalist file");
    ConstructionConfig cfg;
    std::string out_path = "code.qalist", mode = "base";
    c->add_option("--p", cfg.p, "field extension degree 2^p")->capture_default_str();
    c->add_option("--symbols", cfg.n_sym, "mother matrix columns")->capture_default_str();
    c->add_option("--checks", cfg.n_chk, "mother matrix rows")->capture_default_str();
    c->add_option("--girth", cfg.target_girth, "target girth (even)")->capture_default_str();
    c->add_option("--dv", cfg.dv, "variable degree")->capture_default_str();
    c->add_option("--dc", cfg.dc, "check degree")->capture_default_str();
    c->add_option("--psi", cfg.psi, "min active columns per symbol (-1: q/2)")->capture_default_str();
    c->add_option("--phi", cfg.phi, "min kept rows per check")->capture_default_str();
    c->add_option("--seed", cfg.seed, "construction seed")->capture_default_str();
    c->add_option("--max-p", cfg.max_p, "give up beyond this extension degree")->capture_default_str();
    c->add_option("--block-width", cfg.block_width, "replacement block width in symbols")->capture_default_str();
    c->add_option("--mode", mode, "recorded transmission mode {base, extended}")
        ->check(CLI::IsMember({"base", "extended"}));
    c->add_option("--out", out_path, "output qalist path")->capture_default_str();

    // analyze
    auto* a = app.add_subcommand("analyze", "girth census, degree distributions, cycle probability");
    std::string in_path;
    int cap = 12;
    long long p4_trials = 100000;
    uint64_t a_seed = 1;
    a->add_option("--in", in_path, "qalist file")->required();
    a->add_option("--cap", cap, "cycle census cap")->capture_default_str();
    a->add_option("--trials", p4_trials, "cycle probability trials")->capture_default_str();
    a->add_option("--seed", a_seed, "estimator seed")->capture_default_str();

    // sweep
    auto* s = app.add_subcommand("sweep", "Monte-Carlo error-rate sweep, CSV plus SVG");
    ExperimentPlan plan;
    std::string s_in, s_out = "sweep.csv", s_decoder = "sepr", s_channel = "awgn", s_mode = "base";
    std::vector<double> s_points;
    s->add_option("--in", s_in, "qalist file")->required();
    s->add_option("--decoder", s_decoder, "qspa|seb|hepr|sepr|ser|bec")->capture_default_str();
    s->add_option("--channel", s_channel, "bsc|bec|awgn")->capture_default_str();
    s->add_option("--points", s_points, "grid points (crossover / erasure / EbN0 dB)")->required();
    s->add_option("--min-errors", plan.min_frame_errors, "frame errors per point")->capture_default_str();
    s->add_option("--max-frames", plan.max_frames, "frame cap per point")->capture_default_str();
    s->add_option("--mu", plan.sched.mu, "BP iterations per round")->capture_default_str();
    s->add_option("--nu", plan.sched.nu, "hard iterations per round")->capture_default_str();
    s->add_option("--rounds", plan.sched.rounds, "decoding rounds")->capture_default_str();
    s->add_option("--flip-threshold", plan.sched.flip_threshold, "bit-flip threshold (0: majority)")
        ->capture_default_str();
    s->add_option("--max-iter", plan.max_iter, "iteration cap for qspa/seb")->capture_default_str();
    s->add_option("--seed", plan.master_seed, "master seed")->capture_default_str();
    s->add_option("--mode", s_mode, "transmission mode {base, extended}")
        ->check(CLI::IsMember({"base", "extended"}));
    s->add_option("--workers", plan.workers, "worker threads")->capture_default_str();
    s->add_flag("--timing", plan.timing, "stamp wall seconds into the CSV (breaks byte determinism)");
    s->add_option("--dump-frames", plan.dump_frames_path, "binary dump of the first received frames");
    s->add_option("--trace", plan.trace_path, "per-decode trace CSV for the first frame of each point");
    s->add_option("--out", s_out, "CSV path; an .svg sibling is written too")->capture_default_str();

    // threshold
    auto* t = app.add_subcommand("threshold", "bisection threshold estimate");
    std::string t_in, t_decoder = "sepr", t_channel = "awgn", t_mode = "extended";
    ThresholdOptions topt;
    t->add_option("--in", t_in, "qalist file")->required();
    t->add_option("--decoder", t_decoder, "seb|sepr|bec")->capture_default_str();
    t->add_option("--channel", t_channel, "bsc|bec|awgn")->capture_default_str();
    t->add_option("--mode", t_mode, "transmission mode")->check(CLI::IsMember({"base", "extended"}));
    t->add_option("--lo", topt.lo, "bracket low")->capture_default_str();
    t->add_option("--hi", topt.hi, "bracket high")->capture_default_str();
    t->add_option("--target", topt.target, "metric target")->capture_default_str();
    t->add_option("--tol", topt.tolerance, "bracket width at exit")->capture_default_str();
    t->add_option("--iters", topt.iterations, "decoder iterations per probe")->capture_default_str();
    t->add_option("--frames", topt.frames, "frames per probe")->capture_default_str();
    t->add_option("--seed", topt.seed, "probe seed")->capture_default_str();

    // verify
    auto* v = app.add_subcommand("verify", "run the verification suites (exit 3 on failure)");
    bool v_full = false;
    std::vector<int> v_ids;
    v->add_flag("--full", v_full, "include the long Monte-Carlo criteria");
    v->add_option("--only", v_ids, "run specific criteria by number");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        if (*c) return cmd_construct(cfg, out_path, mode);
        if (*a) return cmd_analyze(in_path, cap, p4_trials, a_seed);
        if (*s) {
            plan.decoder = decoder_from_name(s_decoder);
            plan.channel = s_channel == "bsc" ? ChannelKind::bsc
                           : s_channel == "bec" ? ChannelKind::bec
                                                : ChannelKind::biawgn;
            plan.mode = s_mode == "extended" ? TransmitMode::extended : TransmitMode::base;
            plan.points = s_points;
            auto spec = read_qalist(s_in);
            auto result = run_sweep(spec, plan);
            std::ofstream csv(s_out);
            if (!csv) throw std::runtime_error("cannot open " + s_out);
            csv << result.csv();
            auto svg_path = std::filesystem::path(s_out).replace_extension(".svg").string();
            std::ofstream svg(svg_path);
            svg << result.svg();
            std::cout << result.csv();
            std::cout << "wrote " << s_out << " and " << svg_path << "\n";
            return 0;
        }
        if (*t) {
            auto spec = read_qalist(t_in);
            auto kind = t_channel == "bsc" ? ChannelKind::bsc
                        : t_channel == "bec" ? ChannelKind::bec
                                             : ChannelKind::biawgn;
            auto mode_v = t_mode == "extended" ? TransmitMode::extended : TransmitMode::base;
            auto est = estimate_threshold(spec, decoder_from_name(t_decoder), kind, mode_v, topt);
            std::printf("threshold: %.4f (bracket [%.4f, %.4f])\n", est.t_b, est.lo, est.hi);
            for (const auto& [x, m] : est.trace) std::printf("  probe %.4f -> %.6f\n", x, m);
            return 0;
        }
        if (*v) {
            std::vector<int> ids = v_ids;
            if (ids.empty() && !v_full) ids = {1, 2, 3, 4, 5, 7, 10};
            bool ok = run_verification(ids, [](const CriterionResult& r) {
                std::printf("[%s] %2d. %s (%.1fs)\n    %s\n", r.pass ? "PASS" : "FAIL", r.id, r.name.c_str(),
                            r.seconds, r.detail.c_str());
                std::fflush(stdout);
            });
            return ok ? 0 : 3;
        }
    } catch (const std::invalid_argument& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 1;
}
