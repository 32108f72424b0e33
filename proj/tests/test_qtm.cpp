#include <doctest.h>

#include <fstream>
#include <random>
#include <sstream>

#include "qfc/qtm.hpp"

using namespace qfc;

namespace {

std::string data_file(const std::string& name) {
    return std::string(QFC_DATA_DIR) + "/" + name;
}

QtmSpec load(const std::string& name) {
    std::ifstream f(data_file(name));
    REQUIRE(f.good());
    std::ostringstream ss;
    ss << f.rdbuf();
    return QtmSpec::from_text(ss.str());
}

bool has_error_containing(const Diagnostics& ds, const std::string& needle) {
    for (const auto& d : ds)
        if (d.severity == Severity::Error && d.message.find(needle) != std::string::npos)
            return true;
    return false;
}

bool any_error(const Diagnostics& ds) {
    for (const auto& d : ds)
        if (d.severity == Severity::Error) return true;
    return false;
}

ConfigSuperposition random_superposition(const QtmSpec& m, int n, std::mt19937_64& rng) {
    ConfigSuperposition sup;
    sup.n = n;
    sup.p_n = static_cast<int>(m.time_bound(n));
    std::uniform_real_distribution<double> u(-1, 1);
    for (int i = 0; i < 6; ++i) {
        SkewConfig c;
        c.z1 = std::string(sup.p_n, 'b');
        c.z2 = std::string(sup.p_n + 1, 'b');
        for (int cell = -sup.p_n; cell <= sup.p_n; ++cell)
            c.tape_set(cell, sup.p_n, "01b"[rng() % 3]);
        c.h = static_cast<int>(rng() % (2 * sup.p_n - 1)) - (sup.p_n - 1);
        c.q = index_to_bits(rng() % 3, m.state_bits);  // non-final states
        sup.entries[c] += Amplitude(u(rng), u(rng));
    }
    double norm = std::sqrt(sup.norm2());
    for (auto& [k, v] : sup.entries) v /= norm;
    return sup;
}

}  // namespace

TEST_CASE("bundled machines pass the local well-formedness conditions") {
    for (const char* name : {"identity.qtm", "notmachine.qtm", "rot.qtm"}) {
        QtmSpec m = load(name);
        Diagnostics d = check_wellformed(m);
        CHECK(!any_error(d));
        CHECK(!any_error(check_shape(m)));
    }
}

TEST_CASE("seeded violations are each detected") {
    CHECK(has_error_containing(check_wellformed(load("bad_unit.qtm")), "unit-length"));
    CHECK(has_error_containing(check_wellformed(load("bad_orth.qtm")), "orthogonality"));
    CHECK(has_error_containing(check_wellformed(load("bad_sep.qtm")), "separability"));
}

TEST_CASE("shape checks") {
    QtmSpec m = load("identity.qtm");
    // three-branch row fails plain form
    QtmSpec three = m;
    three.delta[{m.q0(), '0'}] = {{"01", '0', Dir::N, {0.5, 0}},
                                  {"10", '0', Dir::N, {0.5, 0}},
                                  {"11", '0', Dir::N, {std::sqrt(0.5), 0}}};
    CHECK(has_error_containing(check_shape(three), "at most two"));
    // wrong normal form
    QtmSpec badnf = m;
    badnf.delta[{m.qf(), '0'}] = {{m.q0(), '0', Dir::L, {1, 0}}};
    CHECK(has_error_containing(check_shape(badnf), "normal form"));
    // cos/sin rows pass
    CHECK(!any_error(check_shape(load("rot.qtm"))));
}

TEST_CASE("step_evolve applies one delta row") {
    QtmSpec m = load("notmachine.qtm");
    ConfigSuperposition c = initial_superposition(m, "1");
    ConfigSuperposition next = step_evolve(m, c);
    REQUIRE(next.entries.size() == 1);
    const auto& [cfg, amp] = *next.entries.begin();
    CHECK(cfg.q == m.qf());
    CHECK(cfg.h == 0);
    CHECK(cfg.tape_at(0, next.p_n) == '0');
    CHECK(std::abs(amp - Amplitude(1, 0)) < 1e-12);
    // halted components are carried unchanged
    ConfigSuperposition frozen = step_evolve(m, next);
    CHECK(frozen.entries == next.entries);
}

TEST_CASE("plain cos/sin rows branch with the right amplitudes") {
    QtmSpec m = load("rot.qtm");
    ConfigSuperposition c = initial_superposition(m, "0");
    ConfigSuperposition next = step_evolve(m, c);
    REQUIRE(next.entries.size() == 2);
    double c4 = std::cos(0.25 * 3.14159265358979324);
    for (const auto& [cfg, amp] : next.entries) {
        if (cfg.tape_at(0, next.p_n) == '0')
            CHECK(std::abs(amp - Amplitude(c4, 0)) < 1e-12);
        else
            CHECK(std::abs(amp - Amplitude(c4, 0)) < 1e-12);  // sin(pi/4) == cos(pi/4)
    }
}

TEST_CASE("run enforces the conservative-run contract") {
    QtmSpec m = load("notmachine.qtm");
    RunResult rr = run(m, "1");
    CHECK(rr.steps == 1);
    REQUIRE(rr.final_config.entries.size() == 1);
    CHECK(output_of(rr.final_config.entries.begin()->first, rr.final_config.p_n) == "0");
    CHECK(rr.final_config.norm2() == doctest::Approx(1.0));

    QtmSpec ident = load("identity.qtm");
    RunResult ri = run(ident, "01");
    CHECK(output_of(ri.final_config.entries.begin()->first, ri.final_config.p_n) == "01");

    // two branches halting at different times
    QtmSpec racy = ident;
    double r = std::sqrt(0.5);
    racy.delta[{ident.q0(), '0'}] = {{ident.qf(), '0', Dir::N, {r, 0}},
                                     {"01", '0', Dir::N, {r, 0}}};
    racy.delta[{"01", '0'}] = {{ident.qf(), '0', Dir::N, {1, 0}}};
    CHECK_THROWS_AS(run(racy, "0"), NotSimultaneous);
}

TEST_CASE("well-formed machines preserve norm; the seeded violation drifts") {
    std::mt19937_64 rng(31337);
    for (const char* name : {"identity.qtm", "notmachine.qtm", "rot.qtm"}) {
        QtmSpec m = load(name);
        for (int i = 0; i < 50; ++i) {
            ConfigSuperposition sup = random_superposition(m, 2, rng);
            ConfigSuperposition next = step_evolve(m, sup);
            CHECK(std::abs(next.norm2() - sup.norm2()) < 1e-9);
        }
    }
    // witness built from the failing row of the unit-length violation
    QtmSpec bad = load("bad_unit.qtm");
    ConfigSuperposition witness = initial_superposition(bad, "0");
    ConfigSuperposition after = step_evolve(bad, witness);
    CHECK(std::abs(after.norm2() - witness.norm2()) > 1e-3);
}

TEST_CASE("step_evolve is linear") {
    QtmSpec m = load("rot.qtm");
    std::mt19937_64 rng(8);
    ConfigSuperposition a = random_superposition(m, 2, rng);
    ConfigSuperposition b = random_superposition(m, 2, rng);
    ConfigSuperposition sum = a;
    for (const auto& [k, v] : b.entries) sum.entries[k] += v;
    sum.prune();
    ConfigSuperposition lhs = step_evolve(m, sum);
    ConfigSuperposition ra = step_evolve(m, a);
    ConfigSuperposition rb = step_evolve(m, b);
    for (const auto& [k, v] : rb.entries) ra.entries[k] += v;
    ra.prune();
    for (const auto& [k, v] : lhs.entries)
        CHECK(std::abs(v - ra.entries[k]) < 1e-12);
    CHECK(lhs.entries.size() == ra.entries.size());
}

TEST_CASE("configuration coding") {
    SkewConfig c;
    c.z1 = "b";
    c.z2 = "1b";
    c.h = 0;
    c.q = "00";
    CHECK(encode_config(c, 1) == "00" "1010" "1101" "1010");
    // length 8 p + ell + 4
    SkewConfig big;
    big.z1 = std::string(3, 'b');
    big.z2 = std::string(4, 'b');
    big.h = -2;
    big.q = "01";
    CHECK(encode_config(big, 3).size() == 8 * 3 + 2 + 4);
    CHECK(decode_config(encode_config(big, 3), 2, 3) == big);
    std::mt19937_64 rng(12);
    for (int i = 0; i < 100; ++i) {
        SkewConfig r;
        int p = 2 + static_cast<int>(rng() % 3);
        r.z1 = std::string(p, 'b');
        r.z2 = std::string(p + 1, 'b');
        for (int cell = -p; cell <= p; ++cell) r.tape_set(cell, p, "01b"[rng() % 3]);
        r.h = static_cast<int>(rng() % (2 * p + 1)) - p;
        r.q = index_to_bits(rng() % 4, 2);
        CHECK(decode_config(encode_config(r, p), 2, p) == r);
    }
    CHECK_THROWS_AS(decode_config("001010", 2, 1), InvalidCode);
    std::string two_heads = "00" "1110" "1101" "1010";
    CHECK_THROWS_AS(decode_config(two_heads, 2, 1), InvalidCode);
    CHECK(tilde_code("1") == "0111");
    CHECK(tilde_code("001") == "00000111");
}
