// Acceptance suite: one pass/fail line per criterion, nonzero exit on any
// failure. Each criterion pins its tolerance in code.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <vector>

#include "qfc/compiler.hpp"
#include "qfc/eval.hpp"
#include "qfc/generator.hpp"
#include "qfc/qtm.hpp"
#include "qfc/state.hpp"
#include "qfc/stdlib.hpp"

using namespace qfc;

namespace {

constexpr double kPi = 3.1415926535897932384626433832795;

int g_failures = 0;

struct Criterion {
    const char* name;
    double elapsed_s = 0;
};

void report(int number, const char* name, bool pass, double budget_s, double elapsed_s) {
    bool in_budget = budget_s <= 0 || elapsed_s <= budget_s;
    std::printf("criterion %2d %-34s %s (%.1fs)\n", number, name,
                pass && in_budget ? "PASS" : "FAIL", elapsed_s);
    if (!pass || !in_budget) ++g_failures;
}

template <typename F>
void timed(int number, const char* name, double budget_s, F body) {
    auto start = std::chrono::steady_clock::now();
    bool ok = false;
    try {
        ok = body();
    } catch (const std::exception& e) {
        std::printf("criterion %2d exception: %s\n", number, e.what());
        ok = false;
    }
    double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    report(number, name, ok, budget_s, secs);
}

QtmSpec load_machine(const std::string& name) {
    std::ifstream f(std::string(QFC_DATA_DIR) + "/" + name);
    std::ostringstream ss;
    ss << f.rdbuf();
    return QtmSpec::from_text(ss.str());
}

// 1. Linearity / null / dimension / norm over 200 generated meas-free terms.
bool criterion1() {
    std::mt19937_64 rng(20240901);
    GenOptions opt;
    for (int i = 0; i < 200; ++i) {
        TermPtr f = random_term(rng, opt);
        int n = 1 + static_cast<int>(rng() % 8);
        State phi = random_state(n, rng());
        State psi = random_state(n, rng());
        if (!eval(f, State(n)).is_null()) return false;
        if (!eval(f, phi.plus(psi)).approx_equal(eval(f, phi).plus(eval(f, psi)), 1e-10))
            return false;
        Amplitude alpha(0.4, 0.7);
        if (!eval(f, phi.scaled(alpha)).approx_equal(eval(f, phi).scaled(alpha), 1e-10))
            return false;
        State out = eval(f, phi);
        if (out.width() != n) return false;
        if (std::abs(out.norm() - phi.norm()) > 1e-10) return false;
    }
    return true;
}

// 2. Unitarity of every stdlib constructor instance (k <= 4, n <= 8).
bool criterion2() {
    std::vector<TermPtr> instances;
    for (const char* g : {"cnot", "wh"}) instances.push_back(basic_gate(g));
    for (double th : {kPi / 4, 1.0}) {
        instances.push_back(basic_gate("z1", th));
        instances.push_back(basic_gate("zrot", th));
        instances.push_back(basic_gate("gps", th));
        instances.push_back(basic_gate("cphase", th));
    }
    for (int k = 1; k <= 4; ++k) {
        instances.push_back(remove_k(k));
        instances.push_back(rep_k(k));
        if (2 * k <= 8) instances.push_back(swap_k(k));
        instances.push_back(qft(k));
        instances.push_back(prefix_skip(basic_gate("wh"), k));
    }
    instances.push_back(reverse_term());
    instances.push_back(copy2());
    instances.push_back(tensor_split(basic_gate("wh"), 2, t_not()));
    instances.push_back(lift_bijection(
        2, {{"00", "01"}, {"01", "10"}, {"10", "11"}, {"11", "00"}}));
    std::map<std::string, TermPtr> fam = {{"00", basic_gate("wh")},
                                          {"01", t_id()},
                                          {"10", t_not()},
                                          {"11", t_rot(0.3)}};
    instances.push_back(branch_family(2, fam));
    instances.push_back(rev_branch_family(2, fam));
    for (const TermPtr& t : instances) {
        if (!is_meas_free(t)) return false;
        int n = std::min(8, 6);
        if (unitarity_defect(matrix_of(t, n)) > 1e-9) return false;
    }
    // a couple of full-width checks at n = 8
    if (unitarity_defect(matrix_of(copy2(), 8)) > 1e-9) return false;
    if (unitarity_defect(matrix_of(qft(4), 8)) > 1e-9) return false;
    return true;
}

// 3. Inverse round trip on 100 generated meas-free terms including kqrec.
bool criterion3() {
    std::mt19937_64 rng(777001);
    GenOptions opt;
    int kqrec_seen = 0;
    for (int i = 0; i < 100; ++i) {
        TermPtr f = random_term(rng, opt);
        std::string text = print_term(f);
        if (text.find("kqrec") != std::string::npos) ++kqrec_seen;
        int n = 1 + static_cast<int>(rng() % 8);
        State phi = random_state(n, rng());
        if (!eval(invert(f), eval(f, phi)).approx_equal(phi, 1e-9)) return false;
    }
    // the h/p swap must actually have been exercised
    return kqrec_seen >= 10;
}

// 4. Gate matrices against the displayed values.
bool criterion4() {
    auto cnot = matrix_of(basic_gate("cnot"), 2);
    const double one = 1.0;
    std::vector<std::vector<double>> want = {
        {one, 0, 0, 0}, {0, one, 0, 0}, {0, 0, 0, one}, {0, 0, one, 0}};
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j)
            if (std::abs(cnot[i][j] - Amplitude(want[i][j], 0)) > 1e-12) return false;
    auto wh = matrix_of(basic_gate("wh"), 1);
    double r = 1.0 / std::sqrt(2.0);
    if (std::abs(wh[0][0] - Amplitude(r, 0)) > 1e-12) return false;
    if (std::abs(wh[0][1] - Amplitude(r, 0)) > 1e-12) return false;
    if (std::abs(wh[1][0] - Amplitude(r, 0)) > 1e-12) return false;
    if (std::abs(wh[1][1] - Amplitude(-r, 0)) > 1e-12) return false;
    auto cp = matrix_of(basic_gate("cphase", kPi / 2), 2);
    for (int i = 0; i < 4; ++i)
        for (int j = 0; j < 4; ++j) {
            Amplitude want_cp = i == j ? (i == 3 ? Amplitude(0, 1) : Amplitude(1, 0))
                                       : Amplitude(0, 0);
            if (std::abs(cp[i][j] - want_cp) > 1e-12) return false;
        }
    return true;
}

// 5. QFT against the independently constructed transform, k in 1..5.
bool criterion5() {
    for (int k = 1; k <= 5; ++k) {
        auto got = matrix_of(qft(k), k);
        std::size_t dim = std::size_t(1) << k;
        double scale = 1.0 / std::sqrt(static_cast<double>(dim));
        for (std::size_t s = 0; s < dim; ++s)
            for (std::size_t t = 0; t < dim; ++t) {
                // num(s) treats the first qubit as the high bit
                Amplitude want =
                    std::polar(scale, 2 * kPi * static_cast<double>(s * t) / dim);
                if (std::abs(got[s][t] - want) > 1e-9) return false;
            }
    }
    return max_abs_diff(matrix_of(qft(1), 1), matrix_of(basic_gate("wh"), 1)) <= 1e-12;
}

// 6. REP_1 / REMOVE_1 on every length-4 basis input.
bool criterion6() {
    for (int i = 0; i < 16; ++i) {
        std::string bits = index_to_bits(i, 4);
        std::string rep = bits.substr(3, 1) + bits.substr(0, 3);
        std::string rem = bits.substr(1) + bits.substr(0, 1);
        if (!eval(rep_k(1), State::basis(bits)).approx_equal(State::basis(rep), 0))
            return false;
        if (!eval(remove_k(1), State::basis(bits)).approx_equal(State::basis(rem), 0))
            return false;
    }
    return true;
}

// 7. Descriptional-complexity numbers.
bool criterion7() {
    if (dc(t_branch(t_id(), t_not())).total != 3) return false;
    for (const TermPtr& leaf :
         {t_id(), t_not(), t_swap(), t_phase(0.5), t_rot(0.5), t_meas(0)})
        if (dc(leaf).total != 1) return false;
    // documented derived counts: stable across runs (paper's own bounds are
    // flagged as unresolved in the project notes)
    if (dc(basic_gate("z1", 1.0)).total != 5) return false;
    if (dc(basic_gate("zrot", 1.0)).total != 7) return false;
    if (dc(basic_gate("gps", 1.0)).total != 7) return false;
    if (dc(basic_gate("cphase", 1.0)).total != 3) return false;
    if (dc(basic_gate("cnot")).total != 3) return false;
    if (dc(basic_gate("wh")).total != 3) return false;
    return true;
}

// 8. Well-formedness: valid machines pass, seeded violations are caught,
//    norm drift over 50-step random-superposition evolution stays tiny.
bool criterion8() {
    for (const char* name : {"identity.qtm", "notmachine.qtm", "rot.qtm"}) {
        QtmSpec m = load_machine(name);
        for (const auto& d : check_wellformed(m))
            if (d.severity == Severity::Error) return false;
    }
    auto violated = [](const std::string& file, const std::string& needle) {
        QtmSpec m = load_machine(file);
        for (const auto& d : check_wellformed(m))
            if (d.severity == Severity::Error && d.message.find(needle) != std::string::npos)
                return true;
        return false;
    };
    if (!violated("bad_unit.qtm", "unit-length")) return false;
    if (!violated("bad_orth.qtm", "orthogonality")) return false;
    if (!violated("bad_sep.qtm", "separability")) return false;

    std::mt19937_64 rng(515151);
    for (const char* name : {"identity.qtm", "notmachine.qtm", "rot.qtm"}) {
        QtmSpec m = load_machine(name);
        int P = static_cast<int>(m.time_bound(2));
        ConfigSuperposition sup;
        sup.n = 2;
        sup.p_n = P;
        std::uniform_real_distribution<double> u(-1, 1);
        for (int i = 0; i < 8; ++i) {
            SkewConfig c;
            c.z1 = std::string(P, 'b');
            c.z2 = std::string(P + 1, 'b');
            for (int cell = -P; cell <= P; ++cell) c.tape_set(cell, P, "01b"[rng() % 3]);
            c.h = static_cast<int>(rng() % (2 * P - 1)) - (P - 1);
            c.q = index_to_bits(rng() % 4, m.state_bits);
            sup.entries[c] += Amplitude(u(rng), u(rng));
        }
        double norm = std::sqrt(sup.norm2());
        for (auto& [k, v] : sup.entries) v /= norm;
        double start = sup.norm2();
        for (int step = 0; step < 50; ++step) {
            // keep heads inside the window the evolution can reach
            bool safe = true;
            for (const auto& [cfg, amp] : sup.entries)
                safe = safe && cfg.h > -P && cfg.h < P;
            if (!safe) break;
            sup = step_evolve(m, sup);
            if (std::abs(sup.norm2() - start) > 1e-9) return false;
        }
    }
    return true;
}

// 9. Compiler end to end on the three bundled machines, |x| <= 3.
bool criterion9() {
    for (const char* name : {"identity.qtm", "notmachine.qtm", "rot.qtm"}) {
        QtmSpec m = load_machine(name);
        CompileArtifact art = compile_full(m);
        for (const std::string& x : {"1", "0", "01", "110"}) {
            VerifyReport rep = verify_against_qtm(m, art, x);
            if (rep.max_prefix_dev > 1e-6) return false;
            if (rep.max_condition_i_dev > 1e-6) return false;
            if (rep.max_condition_ii_dev > 1e-6) return false;
            if (rep.off_support_mass > 1e-6) return false;
        }
    }
    QtmSpec rot = load_machine("rot.qtm");
    CompileArtifact art = compile_full(rot);
    State out = eval(art.full_term, padded_input(rot, "0"));
    if (std::abs(project_prefix(tilde_code("0"), out).norm2() - 0.5) > 1e-6) return false;
    if (std::abs(project_prefix(tilde_code("1"), out).norm2() - 0.5) > 1e-6) return false;
    return true;
}

// 10. COPY_2 on all basic prefixes up to k = 3 plus a superposed case.
bool criterion10() {
    TermPtr c = copy2();
    for (int k = 1; k <= 3; ++k) {
        for (std::uint64_t i = 0; i < (1ull << k); ++i) {
            std::string s = index_to_bits(i, k);
            std::string zero = tilde_code(std::string(k, '0'));
            State in = tensor(State::basis(zero), State::basis(tilde_code(s)));
            State want = tensor(State::basis(tilde_code(s)), State::basis(tilde_code(s)));
            if (!eval(c, in).approx_equal(want, 1e-9)) return false;
            // with payload
            State psi = random_state(2, 1000 + i);
            State in2 = tensor(in, psi);
            State want2 = tensor(want, psi);
            if (!eval(c, in2).approx_equal(want2, 1e-9)) return false;
        }
    }
    // linearity over a superposed prefix
    Amplitude a(0.6, 0), b(0, 0.8);
    State sup(12);
    sup.add(tilde_code("00") + tilde_code("01"), a);
    sup.add(tilde_code("00") + tilde_code("10"), b);
    sup.prune();
    State want(12);
    want.add(tilde_code("01") + tilde_code("01"), a);
    want.add(tilde_code("10") + tilde_code("10"), b);
    want.prune();
    return eval(c, sup).approx_equal(want, 1e-9);
}

// 11. Sparse/dense equivalence over 100 random (term, state) pairs.
bool criterion11() {
    std::mt19937_64 rng(111111);
    GenOptions opt;
    for (int i = 0; i < 100; ++i) {
        TermPtr f = random_term(rng, opt);
        int n = 1 + static_cast<int>(rng() % 10);
        State phi = random_state(n, rng());
        State sparse = eval(f, phi);
        if (n <= 10) {
            auto mat = matrix_of(f, n);
            auto v = densify(phi, n);
            std::vector<Amplitude> res(v.size(), Amplitude(0, 0));
            for (std::size_t r = 0; r < v.size(); ++r)
                for (std::size_t col = 0; col < v.size(); ++col) res[r] += mat[r][col] * v[col];
            if (!sparse.approx_equal(sparsify(res, n), 1e-10)) return false;
        }
    }
    return true;
}

}  // namespace

int main() {
    timed(1, "linearity suite (200 terms)", 30, criterion1);
    timed(2, "stdlib unitarity", 60, criterion2);
    timed(3, "inverse round trip", 30, criterion3);
    timed(4, "gate matrices", 0, criterion4);
    timed(5, "qft vs direct transform", 0, criterion5);
    timed(6, "rearranger length-4 examples", 0, criterion6);
    timed(7, "descriptional complexity", 0, criterion7);
    timed(8, "qtm well-formedness", 0, criterion8);
    timed(9, "compiler end to end", 120, criterion9);
    timed(10, "copy2 contract", 0, criterion10);
    timed(11, "sparse/dense equivalence", 0, criterion11);
    if (g_failures == 0)
        std::printf("acceptance: all 11 criteria PASS\n");
    else
        std::printf("acceptance: %d criteria FAILED\n", g_failures);
    return g_failures == 0 ? 0 : 1;
}
