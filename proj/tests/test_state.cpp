#include <doctest.h>

#include "qfc/state.hpp"

using namespace qfc;

TEST_CASE("basis states and the scalar convention") {
    State s = State::basis("01");
    CHECK(s.ell() == 2);
    CHECK(s.amp("01") == Amplitude(1, 0));
    State unit = State::basis("");
    CHECK(unit.ell() == 0);
    CHECK(unit.amp("") == Amplitude(1, 0));
    State b = State::basis("101");
    CHECK(b.ell() == 3);
    CHECK(b.amp("101") == Amplitude(1, 0));
}

TEST_CASE("tensor products, null absorption, scalars") {
    State zero1(1);  // null of width 1
    State phi = State::basis("1");
    CHECK(tensor(State::basis("0").scaled({0.5, 0}), phi).amp("01") == Amplitude(0.5, 0));
    CHECK(tensor(zero1, phi).is_null());
    CHECK(tensor(phi, zero1).is_null());
    CHECK(tensor(zero1, phi).width() == 2);
    // scalar 0.5 tensor |1> = 0.5|1>
    State half = State::scalar({0.5, 0});
    CHECK(tensor(half, phi).amp("1") == Amplitude(0.5, 0));
    // associativity up to 1e-12
    State x = random_state(2, 11), y = random_state(1, 12), z = random_state(2, 13);
    CHECK(tensor(tensor(x, y), z).approx_equal(tensor(x, tensor(y, z)), 1e-12));
}

TEST_CASE("project_prefix residuals") {
    double r = 1.0 / std::sqrt(2.0);
    State phi(2);
    phi.add("01", {r, 0});
    phi.add("10", {r, 0});
    phi.prune();
    State res = project_prefix("0", phi);
    CHECK(res.ell() == 1);
    CHECK(std::abs(res.amp("1") - Amplitude(r, 0)) < 1e-15);
    // no renormalization
    CHECK(res.norm() == doctest::Approx(r));
    // mismatch becomes null
    CHECK(project_prefix("1", State::basis("01")).is_null());
    // full-length projection is a scalar
    State full = project_prefix("01", phi);
    CHECK(full.ell() == 0);
    CHECK(std::abs(full.amp("") - Amplitude(r, 0)) < 1e-15);
    CHECK_THROWS_AS(project_prefix("000", phi), PrefixTooLong);
    // projecting out of tensor(basis(s), psi) recovers psi exactly
    State psi = random_state(3, 5);
    CHECK(project_prefix("10", tensor(State::basis("10"), psi)).approx_equal(psi, 0));
}

TEST_CASE("inner products") {
    CHECK(inner(State::basis("0"), State::basis("0")) == Amplitude(1, 0));
    CHECK(inner(State::basis("0"), State::basis("1")) == Amplitude(0, 0));
    State phi = random_state(3, 42);
    Amplitude self = inner(phi, phi);
    CHECK(self.imag() == doctest::Approx(0.0));
    CHECK(self.real() == doctest::Approx(1.0));
    CHECK(inner(State(3), phi) == Amplitude(0, 0));
    CHECK_THROWS_AS(inner(State::basis("0"), State::basis("00")), LengthMismatch);
}

TEST_CASE("norm splits across any prefix length") {
    State phi = random_state(4, 9);
    for (int k = 1; k <= 4; ++k) {
        double total = 0;
        for (std::uint64_t i = 0; i < (1ull << k); ++i)
            total += project_prefix(index_to_bits(i, k), phi).norm2();
        CHECK(total == doctest::Approx(phi.norm2()).epsilon(1e-12));
    }
}

TEST_CASE("densify and sparsify round trip") {
    auto v = densify(State::basis("1"), 1);
    CHECK(v[0] == Amplitude(0, 0));
    CHECK(v[1] == Amplitude(1, 0));
    auto z = densify(State(2), 2);
    for (const auto& a : z) CHECK(a == Amplitude(0, 0));
    double r = 1.0 / std::sqrt(2.0);
    State s = sparsify({Amplitude(r, 0), Amplitude(r, 0)}, 1);
    CHECK(std::abs(s.amp("0") - Amplitude(r, 0)) < 1e-15);
    CHECK(std::abs(s.amp("1") - Amplitude(r, 0)) < 1e-15);
    State phi = random_state(5, 77);
    CHECK(sparsify(densify(phi, 5), 5).approx_equal(phi, 1e-14));
    CHECK_THROWS_AS(densify(random_state(3, 1), 13), TooLarge);
}

TEST_CASE("random_state is deterministic and normalized") {
    CHECK(random_state(3, 7).approx_equal(random_state(3, 7), 0));
    CHECK(std::abs(random_state(5, 1).norm() - 1.0) < 1e-12);
    CHECK(!random_state(1, 2).approx_equal(random_state(1, 3), 1e-3));
}

TEST_CASE("state text round trip at full precision") {
    State phi = random_state(3, 123);
    State back = State::from_text(phi.to_text());
    CHECK(back.approx_equal(phi, 1e-16));
    CHECK_THROWS_AS(State::from_text("qubits x"), StateError);
}
