// Command-line surface: term evaluation, matrix extraction, inversion,
// descriptional complexity, property checking, stdlib constructors, and the
// QTM check/run/compile/verify pipeline.
#include <CLI11.hpp>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "qfc/compiler.hpp"
#include "qfc/eval.hpp"
#include "qfc/generator.hpp"
#include "qfc/qtm.hpp"
#include "qfc/state.hpp"
#include "qfc/stdlib.hpp"
#include "qfc/term.hpp"

namespace {

constexpr int kExitCheckFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw IoError("cannot open " + path);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

qfc::TermPtr load_term(const std::string& path) { return qfc::parse_term(slurp(path)); }

qfc::State load_state(const std::string& path) { return qfc::State::from_text(slurp(path)); }

std::uint64_t default_seed() {
    if (const char* env = std::getenv("QFC_SEED")) return std::strtoull(env, nullptr, 10);
    return 0;
}

void print_matrix(const std::vector<std::vector<qfc::Amplitude>>& m) {
    char buf[80];
    for (const auto& row : m) {
        std::string line;
        for (const auto& a : row) {
            std::snprintf(buf, sizeof buf, "%.17g %.17g ", a.real(), a.imag());
            line += buf;
        }
        if (!line.empty()) line.pop_back();
        std::cout << line << "\n";
    }
}

int run_check(const qfc::TermPtr& term, int qubits, std::uint64_t seed) {
    using namespace qfc;
    bool all_pass = true;
    auto report = [&](const std::string& name, bool ok, double worst) {
        std::printf("%-22s %s (max dev %.3g)\n", name.c_str(), ok ? "pass" : "FAIL", worst);
        all_pass = all_pass && ok;
    };
    Diagnostics diag = validate(term);
    if (!diag.empty()) {
        for (const auto& d : diag)
            std::printf("invalid term: [%s] %s\n", d.path.c_str(), d.message.c_str());
        return kExitCheckFailed;
    }
    std::mt19937_64 rng(seed * 77777 + 5);
    double dev_null = 0, dev_add = 0, dev_hom = 0, dev_norm = 0;
    bool dim_ok = true;
    for (int trial = 0; trial < 20; ++trial) {
        int n = 1 + static_cast<int>(rng() % qubits);
        State phi = random_state(n, rng());
        State psi = random_state(n, rng());
        State nullv(n);
        dev_null = std::max(dev_null, eval(term, nullv).norm());
        State sum = eval(term, phi.plus(psi));
        State parts = eval(term, phi).plus(eval(term, psi));
        if (!sum.approx_equal(parts, 1e-10)) dev_add = std::max(dev_add, 1.0);
        std::uniform_real_distribution<double> u(-1, 1);
        Amplitude alpha(u(rng), u(rng));
        State lhs = eval(term, phi.scaled(alpha));
        State rhs = eval(term, phi).scaled(alpha);
        if (!lhs.approx_equal(rhs, 1e-10)) dev_hom = std::max(dev_hom, 1.0);
        State out = eval(term, phi);
        if (!out.is_null() && out.width() != n) dim_ok = false;
        if (is_meas_free(term))
            dev_norm = std::max(dev_norm, std::abs(out.norm() - phi.norm()));
    }
    report("null-preservation", dev_null <= 1e-12, dev_null);
    report("additivity", dev_add == 0, dev_add);
    report("homogeneity", dev_hom == 0, dev_hom);
    report("dimension-preserving", dim_ok, dim_ok ? 0 : 1);
    if (is_meas_free(term)) {
        report("norm-preserving", dev_norm <= 1e-10, dev_norm);
        int n = std::min(qubits, 8);
        double defect = unitarity_defect(matrix_of(term, n));
        report("unitarity", defect <= 1e-9, defect);
    } else {
        std::printf("%-22s skipped (term uses meas)\n", "norm-preserving");
    }
    return all_pass ? 0 : kExitCheckFailed;
}

qfc::TermPtr make_from_cli(const std::vector<std::string>& args) {
    using namespace qfc;
    if (args.empty()) throw CLI::ValidationError("mk needs a constructor name");
    const std::string& name = args[0];
    auto angle_arg = [&](std::size_t i) {
        if (args.size() <= i) throw CLI::ValidationError("missing angle for " + name);
        return parse_angle(args[i]);
    };
    auto int_arg = [&](std::size_t i) {
        if (args.size() <= i) throw CLI::ValidationError("missing integer for " + name);
        return std::stoi(args[i]);
    };
    if (name == "cnot" || name == "wh") return basic_gate(name);
    if (name == "z1" || name == "zrot" || name == "gps" || name == "cphase")
        return basic_gate(name, angle_arg(1));
    if (name == "remove_k") return remove_k(int_arg(1));
    if (name == "rep_k") return rep_k(int_arg(1));
    if (name == "swap_k") return swap_k(int_arg(1));
    if (name == "reverse") return reverse_term();
    if (name == "length_guard") return length_guard(int_arg(1), load_term(args.at(2)));
    if (name == "compo") {
        std::vector<TermPtr> fs;
        for (std::size_t i = 1; i < args.size(); ++i) fs.push_back(load_term(args[i]));
        return compo_all(fs);
    }
    if (name == "branch_k" || name == "rev_branch_k") {
        int k = int_arg(1);
        std::map<std::string, TermPtr> gs;
        for (std::size_t i = 2; i < args.size(); ++i) {
            auto eq = args[i].find('=');
            if (eq == std::string::npos)
                throw CLI::ValidationError("branch families use <bits>=<termfile>");
            gs[args[i].substr(0, eq)] = load_term(args[i].substr(eq + 1));
        }
        return name == "branch_k" ? branch_family(k, gs) : rev_branch_family(k, gs);
    }
    if (name == "lift") {
        int k = int_arg(1);
        std::map<std::string, std::string> table;
        for (std::size_t i = 2; i < args.size(); ++i) {
            auto eq = args[i].find('=');
            if (eq == std::string::npos)
                throw CLI::ValidationError("lift uses <bits>=<bits>");
            table[args[i].substr(0, eq)] = args[i].substr(eq + 1);
        }
        return lift_bijection(k, table);
    }
    if (name == "tensor_split")
        return tensor_split(load_term(args.at(1)), int_arg(2), load_term(args.at(3)));
    if (name == "prefix_skip") return prefix_skip(load_term(args.at(1)), int_arg(2));
    if (name == "qft") return qft(int_arg(1));
    if (name == "copy2") return copy2();
    throw CLI::ValidationError("unknown constructor: " + name);
}

void print_diags(const qfc::Diagnostics& ds) {
    for (const auto& d : ds)
        std::printf("%s [%s] %s\n",
                    d.severity == qfc::Severity::Error ? "error" : "warning",
                    d.path.c_str(), d.message.c_str());
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"schematic quantum polynomial-time calculus tools"};
    app.require_subcommand(1);
    std::uint64_t seed = default_seed();
    app.add_option("--seed", seed, "seed for randomized suites");

    std::string term_path, state_path, out_path, spec_path, artifact_dir, input_bits;
    int qubits = 4;
    bool dense = false;

    auto* cmd_eval = app.add_subcommand("eval", "evaluate a term on a state");
    cmd_eval->add_option("--term", term_path)->required();
    cmd_eval->add_option("--state", state_path)->required();
    cmd_eval->add_flag("--dense", dense, "evaluate through the dense matrix instead");

    auto* cmd_matrix = app.add_subcommand("matrix", "print the 2^n x 2^n matrix of a term");
    cmd_matrix->add_option("--term", term_path)->required();
    cmd_matrix->add_option("--qubits", qubits)->required();

    auto* cmd_invert = app.add_subcommand("invert", "print the scheme-wise inverse");
    cmd_invert->add_option("--term", term_path)->required();

    auto* cmd_dc = app.add_subcommand("dc", "descriptional complexity of a term");
    cmd_dc->add_option("--term", term_path)->required();

    auto* cmd_check = app.add_subcommand("check", "linearity/norm/unitarity property suite");
    cmd_check->add_option("--term", term_path)->required();
    cmd_check->add_option("--qubits", qubits);

    auto* cmd_mk = app.add_subcommand("mk", "emit a derived-combinator term");
    std::vector<std::string> mk_args;
    cmd_mk->add_option("args", mk_args, "constructor name and arguments");

    auto* qtm = app.add_subcommand("qtm", "quantum Turing machine commands");
    qtm->require_subcommand(1);
    auto* qtm_check = qtm->add_subcommand("check", "well-formedness and shape diagnostics");
    qtm_check->add_option("--spec", spec_path)->required();
    auto* qtm_run = qtm->add_subcommand("run", "simulate on an input");
    qtm_run->add_option("--spec", spec_path)->required();
    qtm_run->add_option("--input", input_bits)->required();
    auto* qtm_compile = qtm->add_subcommand("compile", "compile to calculus terms");
    qtm_compile->add_option("--spec", spec_path)->required();
    qtm_compile->add_option("--out", out_path)->required();
    auto* qtm_verify = qtm->add_subcommand("verify", "compare compiled terms to simulation");
    qtm_verify->add_option("--spec", spec_path)->required();
    qtm_verify->add_option("--artifact", artifact_dir)->required();
    qtm_verify->add_option("--input", input_bits)->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        int code = app.exit(e);
        return code == 0 ? 0 : kExitUsage;
    }

    try {
        if (*cmd_eval) {
            qfc::TermPtr t = load_term(term_path);
            qfc::State phi = load_state(state_path);
            qfc::State out(phi.width());
            if (dense) {
                auto m = qfc::matrix_of(t, phi.width());
                auto v = qfc::densify(phi, phi.width());
                std::vector<qfc::Amplitude> res(v.size(), qfc::Amplitude(0, 0));
                for (std::size_t r = 0; r < v.size(); ++r)
                    for (std::size_t c = 0; c < v.size(); ++c) res[r] += m[r][c] * v[c];
                out = qfc::sparsify(res, phi.width());
            } else {
                out = qfc::eval(t, phi);
            }
            std::cout << out.to_text();
            return 0;
        }
        if (*cmd_matrix) {
            print_matrix(qfc::matrix_of(load_term(term_path), qubits));
            return 0;
        }
        if (*cmd_invert) {
            std::cout << qfc::print_term(qfc::invert(load_term(term_path))) << "\n";
            return 0;
        }
        if (*cmd_dc) {
            qfc::DcReport r = qfc::dc(load_term(term_path));
            std::printf("total %llu\n", static_cast<unsigned long long>(r.total));
            std::printf("dag_total %llu\n", static_cast<unsigned long long>(r.dag_total));
            for (const auto& [name, count] : r.per_constructor)
                std::printf("%s %llu\n", name.c_str(), static_cast<unsigned long long>(count));
            return 0;
        }
        if (*cmd_check) return run_check(load_term(term_path), qubits, seed);
        if (*cmd_mk) {
            std::cout << qfc::print_term(make_from_cli(mk_args)) << "\n";
            return 0;
        }
        if (*qtm_check) {
            qfc::QtmSpec m = qfc::QtmSpec::from_text(slurp(spec_path));
            qfc::Diagnostics wf = qfc::check_wellformed(m);
            qfc::Diagnostics sh = qfc::check_shape(m);
            print_diags(wf);
            print_diags(sh);
            bool bad = false;
            for (const auto& d : wf) bad = bad || d.severity == qfc::Severity::Error;
            for (const auto& d : sh) bad = bad || d.severity == qfc::Severity::Error;
            std::printf("wellformed %s\n", bad ? "FAIL" : "pass");
            return bad ? kExitCheckFailed : 0;
        }
        if (*qtm_run) {
            qfc::QtmSpec m = qfc::QtmSpec::from_text(slurp(spec_path));
            qfc::RunResult rr = qfc::run(m, input_bits);
            std::printf("steps %llu\n", static_cast<unsigned long long>(rr.steps));
            for (const auto& [cfg, amp] : rr.final_config.entries) {
                std::printf("config q=%s h=%d z1=%s z2=%s out=%s amp %.17g %.17g\n",
                            cfg.q.c_str(), cfg.h, cfg.z1.c_str(), cfg.z2.c_str(),
                            qfc::output_of(cfg, rr.final_config.p_n).c_str(), amp.real(),
                            amp.imag());
            }
            return 0;
        }
        if (*qtm_compile) {
            qfc::QtmSpec m = qfc::QtmSpec::from_text(slurp(spec_path));
            qfc::CompileArtifact art = qfc::compile_full(m);
            qfc::write_artifact(art, out_path);
            std::printf("wrote artifact to %s\n", out_path.c_str());
            return 0;
        }
        if (*qtm_verify) {
            qfc::QtmSpec m = qfc::QtmSpec::from_text(slurp(spec_path));
            qfc::CompileArtifact art = qfc::read_artifact(artifact_dir);
            qfc::VerifyReport rep = qfc::verify_against_qtm(m, art, input_bits);
            std::printf("steps %llu\n", static_cast<unsigned long long>(rep.steps));
            std::printf("max_prefix_dev %.3g\n", rep.max_prefix_dev);
            std::printf("max_condition_i_dev %.3g\n", rep.max_condition_i_dev);
            std::printf("max_condition_ii_dev %.3g\n", rep.max_condition_ii_dev);
            std::printf("off_support_mass %.3g\n", rep.off_support_mass);
            bool ok = rep.pass();
            std::printf("verify %s\n", ok ? "pass" : "FAIL");
            return ok ? 0 : kExitCheckFailed;
        }
    } catch (const IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return kExitIo;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kExitCheckFailed;
    }
    return kExitUsage;
}
