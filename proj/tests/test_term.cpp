#include <doctest.h>

#include "qfc/term.hpp"

using namespace qfc;

namespace {
std::map<std::string, FsKind> fs1(FsKind f0, FsKind f1) {
    return {{"0", f0}, {"1", f1}};
}
}  // namespace

TEST_CASE("validate catches the recursion-rule invariants") {
    CHECK(validate(t_id()).empty());
    // all-identity branch table
    TermPtr bad = t_kqrec(1, 1, t_id(), t_id(), t_id(), fs1(FsKind::Ident, FsKind::Ident));
    bool found = false;
    for (const auto& d : validate(bad)) found = found || d.message.find("SelfRef") != std::string::npos;
    CHECK(found);
    // t < k-1
    TermPtr small_t = t_kqrec(2, 1, t_id(), t_id(), t_id(),
                              {{"00", FsKind::SelfRef},
                               {"01", FsKind::Ident},
                               {"10", FsKind::Ident},
                               {"11", FsKind::Ident}});
    CHECK(validate(small_t).empty());
    TermPtr bad_t = t_kqrec(3, 1, t_id(), t_id(), t_id(),
                            {{"000", FsKind::SelfRef}});
    found = false;
    for (const auto& d : validate(bad_t)) found = found || d.message.find("k-1") != std::string::npos;
    CHECK(found);
    // meas inside p
    TermPtr meas_p = t_kqrec(1, 1, t_id(), t_id(), t_compo(t_meas(1), t_id()),
                             fs1(FsKind::SelfRef, FsKind::Ident));
    found = false;
    for (const auto& d : validate(meas_p)) found = found || d.message.find("meas-free") != std::string::npos;
    CHECK(found);
    // crot gating
    CHECK(!validate(t_crot(2)).empty());
    CHECK(validate(t_crot(2), true).empty());
}

TEST_CASE("meas-freeness") {
    CHECK(!is_meas_free(t_meas(0)));
    CHECK(is_meas_free(t_compo(t_not(), t_swap())));
    CHECK(!is_meas_free(t_kqrec(1, 1, t_id(), t_id(), t_compo(t_meas(1), t_id()),
                                fs1(FsKind::SelfRef, FsKind::Ident))));
}

TEST_CASE("descriptional complexity counts") {
    CHECK(dc(t_not()).total == 1);
    CHECK(dc(t_branch(t_id(), t_not())).total == 3);
    CHECK(dc(t_compo(t_not(), t_rot(0.785))).total == 3);
    // shared structurally identical subterms collapse in the dag count
    TermPtr wh = t_compo(t_not(), t_rot(0.785));
    TermPtr twice = t_compo(wh, wh);
    CHECK(dc(twice).total == 7);
    CHECK(dc(twice).dag_total == 4);
    auto per = dc(twice).per_constructor;
    CHECK(per["compo"] == 3);
    CHECK(per["not"] == 2);
    CHECK(per["rot"] == 2);
    std::uint64_t sum = 0;
    for (const auto& [k, v] : per) sum += v;
    CHECK(sum == dc(twice).total);
}

TEST_CASE("inversion follows the scheme-by-scheme rules") {
    TermPtr r = invert(t_rot(1.0));
    CHECK(r->kind == Kind::Rot);
    CHECK(r->theta == doctest::Approx(2 * 3.14159265358979324 - 1.0));
    TermPtr c = invert(t_compo(t_not(), t_phase(1.0)));
    CHECK(c->kind == Kind::Compo);
    CHECK(c->g->kind == Kind::Phase);
    CHECK(c->h->kind == Kind::Not);
    CHECK_THROWS_AS(invert(t_meas(0)), NotInvertible);
    // kqrec swaps h and p
    TermPtr k = t_kqrec(1, 2, t_swap(), t_phase(0.5), t_not(), fs1(FsKind::SelfRef, FsKind::Ident));
    TermPtr ki = invert(k);
    CHECK(ki->h->kind == Kind::Not);
    CHECK(ki->p->kind == Kind::Phase);
    CHECK(ki->p->theta == doctest::Approx(2 * 3.14159265358979324 - 0.5));
    CHECK(invert(t_crot(3))->crot_j == -3);
}

TEST_CASE("parser and printer round trip byte-exactly") {
    TermPtr t = t_kqrec(2, 3, t_compo(t_not(), t_rot(0.25)), t_swap(),
                        t_switch(2, t_id(), t_phase(1.5)),
                        {{"00", FsKind::SelfRef},
                         {"01", FsKind::Ident},
                         {"10", FsKind::Ident},
                         {"11", FsKind::SelfRef}});
    std::string text = print_term(t);
    CHECK(print_term(parse_term(text)) == text);
    CHECK(print_term(parse_term("(compo (not) (rot pi/4))")) ==
          print_term(t_compo(t_not(), t_rot(parse_angle("pi/4")))));
    CHECK(parse_angle("2pi/8") == doctest::Approx(parse_angle("pi/4")));
    CHECK(parse_angle("-pi/2") == doctest::Approx(3 * 3.14159265358979324 / 2));
    CHECK_THROWS_AS(parse_term("(frob)"), ParseError);
    CHECK_THROWS_AS(parse_term("(not) junk"), ParseError);
    CHECK_THROWS_AS(parse_angle("pi/x"), ParseError);
}
