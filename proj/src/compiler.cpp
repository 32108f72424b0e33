#include "qfc/compiler.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "qfc/eval.hpp"
#include "qfc/stdlib.hpp"

namespace qfc {

namespace {

namespace fs = std::filesystem;

std::string zeros(int n) { return std::string(n, '0'); }

std::string sym2(char s) {
    switch (s) {
        case '0': return "00";
        case '1': return "01";
        case 'b': return "10";
    }
    throw CompileError(std::string("bad symbol ") + s);
}

std::map<std::string, FsKind> scan_fs(const std::vector<std::string>& self_prefixes) {
    std::map<std::string, FsKind> fs;
    for (int i = 0; i < 16; ++i) {
        std::string key;
        for (int b = 3; b >= 0; --b) key += ((i >> b) & 1) ? '1' : '0';
        FsKind kind = FsKind::Ident;
        for (const auto& p : self_prefixes)
            if (key.compare(0, p.size(), p) == 0) kind = FsKind::SelfRef;
        fs[key] = kind;
    }
    return fs;
}

std::map<std::string, FsKind> all_self(int k) {
    std::map<std::string, FsKind> fs;
    for (std::uint64_t i = 0; i < (std::uint64_t(1) << k); ++i) {
        std::string key;
        for (int b = k - 1; b >= 0; --b) key += ((i >> b) & 1) ? '1' : '0';
        fs[key] = FsKind::SelfRef;
    }
    return fs;
}

TermPtr chain(const std::vector<TermPtr>& application_order) {
    TermPtr acc = application_order.front();
    for (std::size_t i = 1; i < application_order.size(); ++i)
        acc = t_compo(application_order[i], acc);
    return acc;
}

// The construction terms, shared between compile_full and the stage builders.
struct Builder {
    const QtmSpec& m;
    int ell;
    std::string q0, qf;

    explicit Builder(const QtmSpec& spec)
        : m(spec), ell(spec.state_bits), q0(spec.q0()), qf(spec.qf()) {}

    // Dispatch past the leading all-zero spec prefix.
    TermPtr bf_spec(TermPtr x) const { return branch_tree(ell, {{q0, std::move(x)}}); }
    // Dispatch past flag quad and the q register (used before q moves back).
    TermPtr nest_q(TermPtr x) const {
        return branch_tree(4, {{"0000", branch_tree(ell, {{q0, std::move(x)}})}});
    }
    TermPtr ps(TermPtr x) const { return prefix_skip(std::move(x), 1); }

    // --- initializer ------------------------------------------------------
    TermPtr spread() const {
        // W reversed; every level pulls three fuel zeros behind the front bit
        // and stamps a reversed cell [a001].
        TermPtr lam = lift_bijection(
            4, {{"0000", "0001"}, {"0001", "1001"}, {"1001", "0000"}});
        TermPtr p = t_compo(lam, rep_k(3));
        TermPtr srec = t_kqrec(4, 3, t_id(), t_id(), p, all_self(4));
        return chain({reverse_term(), srec, reverse_term()});
    }

    TermPtr seed_right() const {
        // Turn the last cell into the right print head [1100].
        TermPtr flip = lift_bijection(4, {{"1000", "1100"}, {"1100", "1000"}});
        return t_kqrec(4, 7, flip, t_id(), t_id(), all_self(4));
    }

    TermPtr right_tick() const {
        // [3^0 cell][2^0 head] -> [moved head 01][blank]; then restore 01->11.
        TermPtr fire = lift_bijection(8, {{"10001100", "01001010"}, {"01001010", "10001100"}});
        TermPtr scan =
            t_kqrec(4, 3, t_id(), t_id(), fire, scan_fs({"1000", "1001"}));
        TermPtr flip = lift_bijection(4, {{"0100", "1100"}, {"1100", "0100"}});
        TermPtr restore =
            t_kqrec(4, 3, t_id(), t_id(), flip, scan_fs({"1000", "1001"}));
        return t_compo(restore, scan);
    }

    TermPtr dissolve_right() const {
        TermPtr flip = lift_bijection(4, {{"1100", "1010"}, {"1010", "1100"}});
        return t_kqrec(4, 3, t_id(), t_id(), flip, scan_fs({"1000", "1001"}));
    }

    TermPtr seed_left() const {
        return lift_bijection(4, {{"1000", "1100"}, {"1100", "1000"}});
    }

    TermPtr left_tick() const {
        // [2^0 head][10 cell] -> [blank][01-marked head carrying the symbol].
        std::map<std::string, std::string> table;
        for (const std::string& ab : {"00", "01", "10", "11"}) {
            std::string from = "1100" + std::string("10") + ab;
            std::string to = "1010" + std::string("01") + ab;
            table[from] = to;
            table[to] = from;
        }
        TermPtr fire = lift_bijection(8, table);
        TermPtr scan = t_kqrec(4, 3, t_id(), t_id(), fire, scan_fs({"1010"}));
        // Flip bit 1 when bit 2 is set: restores marker 01 -> 11.
        TermPtr cl = chain({t_swap(), t_branch(t_id(), t_not()), t_swap()});
        TermPtr restore = t_kqrec(4, 3, t_id(), t_id(), cl, scan_fs({"1010"}));
        return t_compo(restore, scan);
    }

    TermPtr init_final() const {
        // Move q behind the cells: [quad][q][cells] -> [quad][cells][q].
        return branch_tree(4, {{"0000", remove_k(ell)}});
    }

    TermPtr init_term() const {
        std::vector<TermPtr> order = {
            ps(ps(nest_q(spread()))),
            ps(ps(nest_q(seed_right()))),
            counter_loop(ps(nest_q(right_tick()))),
            ps(ps(nest_q(dissolve_right()))),
            ps(ps(nest_q(seed_left()))),
            ps(counter_loop(nest_q(left_tick()))),
            ps(ps(init_final())),
        };
        return bf_spec(chain(order));
    }

    // --- single step ------------------------------------------------------
    TermPtr local_step_unitary() const {
        // Unitary on the gathered [mB][q][quad][mA][symB][mC] slice (ell+12
        // bits, exact width under tensor_split). A fresh all-zero quad is the
        // one-shot permit: firing writes 111x into it, so no window fires
        // twice and halted runs pass through on the identity columns.
        std::map<std::string, std::vector<std::pair<std::string, std::complex<double>>>> cols;
        for (const auto& [key, row] : m.delta) {
            const auto& [q, sigma] = key;
            for (const std::string& trail : {"10", "00"}) {
                std::string input = "11" + q + "0000" + trail + sym2(sigma) + "10";
                std::vector<std::pair<std::string, std::complex<double>>> outs;
                if (q == qf) {
                    outs.emplace_back(input, std::complex<double>(1, 0));
                } else {
                    // the erased left-trail bit moves into the quad's last slot
                    std::string quad = trail == "10" ? "1111" : "1110";
                    for (const DeltaTarget& t : row) {
                        std::string mA, mB, mC;
                        switch (t.dir) {
                            case Dir::L: mA = "11"; mB = "10"; mC = "10"; break;
                            case Dir::N: mA = "10"; mB = "11"; mC = "10"; break;
                            case Dir::R: mA = "10"; mB = "00"; mC = "11"; break;
                        }
                        outs.emplace_back(mB + t.state + quad + mA + sym2(t.symbol) + mC,
                                          t.amp);
                    }
                }
                cols[input] = outs;
            }
        }
        return prefix_unitary(ell + 12, cols, ell + 12);
    }

    TermPtr sigma_perm(bool inverse) const {
        // Pulled layout [q quad window(12)]; gather
        // [mB, q, quad, mA, symB, mC] in front of [symA, symC].
        int m2 = ell + 16;
        std::vector<int> src(m2);
        int pos = 0;
        auto put = [&](int from) { src[pos++] = from; };
        put(ell + 9);                      // mB
        put(ell + 10);
        for (int i = 1; i <= ell; ++i) put(i);
        for (int i = 1; i <= 4; ++i) put(ell + i);  // quad
        put(ell + 5);                      // mA
        put(ell + 6);
        put(ell + 11);                     // symB
        put(ell + 12);
        put(ell + 13);                     // mC
        put(ell + 14);
        put(ell + 7);                      // symA
        put(ell + 8);
        put(ell + 15);                     // symC
        put(ell + 16);
        if (!inverse) return position_perm(src);
        std::vector<int> inv(m2);
        for (int i = 0; i < m2; ++i) inv[src[i] - 1] = i + 1;
        return position_perm(inv);
    }

    TermPtr scan_step() const {
        // The synthesized local unitary touches only the gathered slice;
        // confining it to that exact width keeps its internals off the long
        // tail and lets evaluation memoize the few distinct windows.
        TermPtr u_core = tensor_split(local_step_unitary(), ell + 12, t_id());
        TermPtr u_local = chain({sigma_perm(false), u_core, sigma_perm(true)});
        TermPtr fire = chain({rep_k(ell + 4), u_local, remove_k(ell + 4)});
        TermPtr guard = t_switch(ell + 15, t_id(), fire);
        return t_kqrec(4, ell + 7, t_id(), t_id(), guard, scan_fs({"10"}));
    }

    // Move the spent quad from the register end into the stack before q.
    TermPtr stack_push() const {
        std::vector<int> quad_first(ell + 4);
        for (int i = 0; i < 4; ++i) quad_first[i] = ell + 1 + i;
        for (int i = 0; i < ell; ++i) quad_first[4 + i] = i + 1;
        return chain({rep_k(ell + 4), position_perm(quad_first), remove_k(ell + 4)});
    }

    TermPtr sweep() const {
        // Fetch four fresh supply zeros to the end, run the scan, push the
        // spent quad onto the stack.
        std::vector<TermPtr> fetch(4, remove_k(1));
        TermPtr core = chain({scan_step(), stack_push()});
        std::vector<TermPtr> order = fetch;
        order.push_back(ps(core));
        return chain(order);
    }

    TermPtr loop_term() const {
        return bf_spec(ps(counter_loop(sweep())));
    }

    // --- output extraction --------------------------------------------------
    TermPtr output_chain() const {
        TermPtr rotate_left_region = counter_loop(ps(remove_k(4)));
        TermPtr head_dissolve = lift_bijection(
            4, {{"1100", "1000"}, {"1000", "1100"}, {"1101", "1001"}, {"1001", "1101"}});
        TermPtr bmark_flip = lift_bijection(4, {{"1010", "1011"}, {"1011", "1010"}});
        TermPtr bmark = t_kqrec(4, 3, t_id(), t_id(), bmark_flip, scan_fs({"1000", "1001"}));
        TermPtr extract =
            t_kqrec(4, 3, t_id(), remove_k(2), t_id(), scan_fs({"1000", "1001"}));
        std::vector<TermPtr> order = {
            ps(rotate_left_region),
            ps(ps(ps(head_dissolve))),
            ps(ps(ps(bmark))),
            ps(ps(ps(extract))),
        };
        return bf_spec(chain(order));
    }
    TermPtr rotate_run_back() const {
        // Moves a leading 0^k 1 run to the register end (reversed).
        return t_kqrec(1, 1, t_id(), remove_k(1), t_id(),
                       std::map<std::string, FsKind>{{"0", FsKind::SelfRef},
                                                     {"1", FsKind::Ident}});
    }

    TermPtr output_term() const {
        // Clear the spec prefix and both counters off the front afterwards.
        return chain({output_chain(), remove_k(ell), rotate_run_back(), rotate_run_back()});
    }

    TermPtr strip_tilde() const {
        return t_kqrec(2, 1, t_id(), remove_k(1), t_id(),
                       std::map<std::string, FsKind>{{"00", FsKind::SelfRef},
                                                     {"01", FsKind::SelfRef},
                                                     {"10", FsKind::Ident},
                                                     {"11", FsKind::Ident}});
    }

    TermPtr step_term() const {
        // Standalone step on [q][cells][0^4]: wrap the sweep's section layout.
        TermPtr pre = chain({rep_k(4), branch_tree(4, {{"0000", remove_k(ell)}})});
        std::map<std::string, TermPtr> post_dispatch = {{"0000", rep_k(ell)},
                                                        {"1000", rep_k(ell)}};
        TermPtr post = chain({branch_tree(4, post_dispatch), remove_k(4)});
        return chain({pre, sweep(), post});
    }

    TermPtr arrival_fix() const {
        return chain({remove_k(ell), clean_scan(), rep_k(ell)});
    }
};

void require_valid_machine(const QtmSpec& m) {
    Diagnostics wf = check_wellformed(m);
    for (const auto& d : wf)
        if (d.severity == Severity::Error)
            throw CompileError("machine is not well-formed: [" + d.path + "] " + d.message);
    Diagnostics sh = check_shape(m);
    for (const auto& d : sh)
        if (d.severity == Severity::Error)
            throw CompileError("machine is not plain/normal-form: [" + d.path + "] " +
                               d.message);
}

}  // namespace

int padded_length(const QtmSpec& m, int n) {
    int P = static_cast<int>(m.time_bound(n));
    return 2 * m.state_bits + 10 * P + 10 - n;
}

State padded_input(const QtmSpec& m, const std::string& x) {
    return padded_input_state(m, State::basis(x));
}

State padded_input_state(const QtmSpec& m, const State& phi) {
    int n = phi.ell();
    if (n < 1) throw CompileError("input must have at least one qubit");
    int P = static_cast<int>(m.time_bound(n));
    if (P < n || P < 2)
        throw CompileError("time bound too small for this input length");
    std::string pre = zeros(m.state_bits) + zeros(P - n) + "1" + zeros(P) + "1" + zeros(4) +
                      zeros(m.state_bits) + zeros(7 * P + 3);
    std::string suf = zeros(P + 1 - n);
    return tensor(tensor(State::basis(pre), phi), State::basis(suf));
}

TermPtr compile_initializer(const QtmSpec& m) {
    require_valid_machine(m);
    return Builder(m).init_term();
}

TermPtr compile_step(const QtmSpec& m) {
    require_valid_machine(m);
    return Builder(m).step_term();
}

CompileArtifact compile_full(const QtmSpec& m) {
    require_valid_machine(m);
    Builder b(m);
    CompileArtifact art;
    art.state_bits = m.state_bits;
    art.time_poly = m.time_poly;
    art.init_term = b.init_term();
    art.step_term = b.step_term();
    art.loop_term = b.loop_term();
    art.output_term = b.output_term();
    art.full_term = chain({art.init_term, art.loop_term, art.output_term});
    art.decode_output_term = t_compo(b.strip_tilde(), art.full_term);
    art.arrival_fix_term = b.arrival_fix();
    std::ostringstream formula;
    formula << "len = 2*" << m.state_bits << " + 10*P + 10 - n, P = p(n)";
    art.register_length_formula = formula.str();
    art.layout_notes =
        "input = [0^ell dispatch][0^(P-n) 1 right-print counter][0^P 1 loop counter]"
        "[0^4 step-record quad][0^ell q][0^(7P+3) fuel][x][0^(P+1-n) fuel]; "
        "the loop section is [quad][cells][q]; the coded configuration "
        "([q][cells], offset ell + 2P - n + 2 + 4 with q moved to the section "
        "tail) uses markers 11/10 and symbols 00/01/10; the quad's first bit "
        "toggles once per executed step and ends at (halting time mod 2); "
        "counters leave the register front reversed after output extraction.";
    for (const TermPtr& t :
         {art.init_term, art.step_term, art.loop_term, art.output_term, art.full_term}) {
        Diagnostics d = validate(t);
        if (!d.empty())
            throw CompileError("internal: compiled stage failed validation: " + d[0].message);
        if (!is_meas_free(t)) throw CompileError("internal: compiled stage uses meas");
    }
    return art;
}

namespace {

// Expected final register for one simulator outcome, evaluated through the
// artifact's own output stage (a basis permutation).
std::string expected_final_key(const QtmSpec& m, const CompileArtifact& art, int n,
                               std::uint64_t steps, const SkewConfig& r) {
    int P = static_cast<int>(m.time_bound(n));
    std::string code = encode_config(r, P);
    std::string cells = code.substr(m.state_bits);
    std::string quad = (steps % 2 == 1 ? "1" : "0") + zeros(3);
    std::string reg = zeros(m.state_bits) + zeros(P - n) + "1" + zeros(P) + "1" + quad +
                      cells + r.q;
    State out = eval(art.output_term, State::basis(reg));
    if (out.entries().size() != 1)
        throw CompileError("output stage did not act as a basis permutation");
    return out.entries().begin()->first;
}

struct Outcome {
    std::string x;
    Amplitude weight;        // <x|phi> * alpha_{x,r}
    std::string output;      // M[r]
    std::string final_key;   // expected compiled basis string
    std::string rest_key;    // final_key minus the tilde prefix
    std::string sim_rest;    // simulator-side residual identity
};

VerifyReport verify_impl(const QtmSpec& m, const CompileArtifact& art, const State& phi) {
    // Re-serialize and parse every stage first: the artifact must be a pure
    // term, not host machinery.
    CompileArtifact checked = art;
    checked.output_term = parse_term(print_term(art.output_term));
    checked.full_term = parse_term(print_term(art.full_term));

    int n = phi.ell();
    VerifyReport rep;
    std::vector<Outcome> outcomes;
    std::map<std::string, double> sim_prefix_prob;
    for (const auto& [x, amp_x] : phi.entries()) {
        RunResult rr = run(m, x);
        rep.steps = rr.steps;
        for (const auto& [r, alpha] : rr.final_config.entries) {
            Outcome o;
            o.x = x;
            o.weight = amp_x * alpha;
            o.output = output_of(r, rr.final_config.p_n);
            o.final_key = expected_final_key(m, checked, n, rr.steps, r);
            o.rest_key = o.final_key.substr(2 * o.output.size() + 2);
            std::ostringstream srk;
            srk << r.z1 << '|' << r.z2.substr(o.output.size()) << '|' << r.q << '|'
                << rr.steps % 2;
            o.sim_rest = srk.str();
            outcomes.push_back(std::move(o));
            sim_prefix_prob[outcomes.back().output] += std::norm(amp_x * alpha);
        }
    }

    State compiled = eval(checked.full_term, padded_input_state(m, phi));

    // (a) output-prefix squared amplitudes (tilde codes are prefix-free).
    for (const auto& [y, p_sim] : sim_prefix_prob) {
        double p_cmp = project_prefix(tilde_code(y), compiled).norm2();
        rep.max_prefix_dev = std::max(rep.max_prefix_dev, std::abs(p_sim - p_cmp));
    }

    // Mass outside the expected support.
    std::map<std::string, Amplitude> expected;
    for (const auto& o : outcomes) expected[o.final_key] += o.weight;
    double off = 0;
    for (const auto& [key, amp] : compiled.entries())
        if (!expected.count(key)) off += std::norm(amp);
    rep.off_support_mass = off;

    // Per-outcome compiled amplitudes (per basis input, so superposed inputs
    // still yield per-(x, r) data).
    std::map<std::string, State> compiled_by_x;
    for (const auto& [x, amp_x] : phi.entries())
        compiled_by_x.emplace(x, eval(checked.full_term, padded_input(m, x)));
    auto compiled_amp = [&](const Outcome& o) {
        return compiled_by_x.at(o.x).amp(o.final_key) * phi.amp(o.x);
    };

    // (i) cross inner-product magnitudes; (ii) orthogonality across distinct
    // final configurations within an output sector.
    for (std::size_t i = 0; i < outcomes.size(); ++i) {
        for (std::size_t j = 0; j < outcomes.size(); ++j) {
            const Outcome& a = outcomes[i];
            const Outcome& b = outcomes[j];
            if (a.output.size() != b.output.size()) continue;
            double sim_ip = (a.sim_rest == b.sim_rest)
                                ? std::abs(std::conj(a.weight) * b.weight)
                                : 0.0;
            double cmp_ip = (a.rest_key == b.rest_key)
                                ? std::abs(std::conj(compiled_amp(a)) * compiled_amp(b))
                                : 0.0;
            rep.max_condition_i_dev =
                std::max(rep.max_condition_i_dev, std::abs(sim_ip - cmp_ip));
            if (i != j && a.x == b.x && a.output == b.output && a.final_key != b.final_key &&
                a.rest_key == b.rest_key) {
                rep.max_condition_ii_dev = std::max(
                    rep.max_condition_ii_dev,
                    std::abs(std::conj(compiled_amp(a)) * compiled_amp(b)));
            }
        }
    }
    return rep;
}

}  // namespace

VerifyReport verify_against_qtm(const QtmSpec& m, const CompileArtifact& art,
                                const std::string& x) {
    return verify_impl(m, art, State::basis(x));
}

VerifyReport verify_against_qtm_state(const QtmSpec& m, const CompileArtifact& art,
                                      const State& phi) {
    return verify_impl(m, art, phi);
}

std::string CompileArtifact::manifest_text() const {
    std::ostringstream os;
    os << "state_bits " << state_bits << "\n";
    os << "time_bound";
    for (std::uint64_t c : time_poly) os << ' ' << c;
    os << "\n";
    os << "register_length " << register_length_formula << "\n";
    os << "layout " << layout_notes << "\n";
    return os.str();
}

void write_artifact(const CompileArtifact& art, const std::string& dir) {
    fs::create_directories(dir);
    auto put = [&](const std::string& name, const std::string& body) {
        std::ofstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) throw CompileError("cannot write " + name + " in " + dir);
        f << body << "\n";
    };
    put("init.term", print_term(art.init_term));
    put("step.term", print_term(art.step_term));
    put("loop.term", print_term(art.loop_term));
    put("output.term", print_term(art.output_term));
    put("decode_output.term", print_term(art.decode_output_term));
    put("full.term", print_term(art.full_term));
    put("arrival_fix.term", print_term(art.arrival_fix_term));
    put("manifest.txt", art.manifest_text());
}

CompileArtifact read_artifact(const std::string& dir) {
    auto get = [&](const std::string& name) {
        std::ifstream f(fs::path(dir) / name, std::ios::binary);
        if (!f) throw CompileError("cannot read " + name + " in " + dir);
        std::ostringstream ss;
        ss << f.rdbuf();
        return ss.str();
    };
    CompileArtifact art;
    art.init_term = parse_term(get("init.term"));
    art.step_term = parse_term(get("step.term"));
    art.loop_term = parse_term(get("loop.term"));
    art.output_term = parse_term(get("output.term"));
    art.decode_output_term = parse_term(get("decode_output.term"));
    art.full_term = parse_term(get("full.term"));
    art.arrival_fix_term = parse_term(get("arrival_fix.term"));
    std::istringstream mf(get("manifest.txt"));
    std::string line;
    while (std::getline(mf, line)) {
        std::istringstream ls(line);
        std::string key;
        ls >> key;
        if (key == "state_bits") ls >> art.state_bits;
        else if (key == "time_bound") {
            std::uint64_t c;
            while (ls >> c) art.time_poly.push_back(c);
        } else if (key == "register_length") {
            std::getline(ls, art.register_length_formula);
        } else if (key == "layout") {
            std::getline(ls, art.layout_notes);
        }
    }
    return art;
}

}  // namespace qfc
