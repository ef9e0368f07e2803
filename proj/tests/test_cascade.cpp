#include <doctest.h>

#include <algorithm>
#include <random>
#include <sstream>

#include "iae/cascade.hpp"

using namespace iae;

namespace {

UserId id_of(const CascadeDataset& d, const char* tok) { return *d.vocabulary().find(tok); }

std::string random_corpus(std::mt19937_64& rng) {
  std::uniform_int_distribution<int> n_casc(0, 12), len(2, 7), user(0, 30);
  std::ostringstream out;
  const int n = n_casc(rng);
  for (int i = 0; i < n; ++i) {
    if (i % 4 == 0) out << "# comment " << i << '\n';
    out << "c" << i << '\t';
    std::vector<int> users;
    const int l = len(rng);
    while (static_cast<int>(users.size()) < l) {
      int u = user(rng);
      if (std::find(users.begin(), users.end(), u) == users.end()) users.push_back(u);
    }
    for (std::size_t k = 0; k < users.size(); ++k) out << (k ? " " : "") << "user" << users[k];
    out << (i % 3 == 0 ? "\r\n" : "\n");
  }
  return out.str();
}

}  // namespace

TEST_CASE("parse a single cascade") {
  const auto d = parse_cascade_string("c1\t1 5 3 7 4\n");
  REQUIRE(d.cascade_count() == 1);
  CHECK(d.user_count() == 5);
  const auto& c = d.cascades()[0];
  CHECK(c.id == "c1");
  CHECK(d.vocabulary().token(c.source()) == "1");
  CHECK(c.infected_count() == 4);
  CHECK(infection_order(c, id_of(d, "3")) == 2);
  CHECK(infection_order(c, id_of(d, "4")) == 4);
  CHECK(infection_order(c, id_of(d, "5")) == 1);
  CHECK_FALSE(infection_order(c, id_of(d, "1")).has_value());
  CHECK_FALSE(infection_order(c, static_cast<UserId>(999)).has_value());
}

TEST_CASE("tokens are interned in first-appearance order") {
  const auto d = parse_cascade_string("a\tx y\nb\ty z x\n");
  CHECK(to_index(id_of(d, "x")) == 0);
  CHECK(to_index(id_of(d, "y")) == 1);
  CHECK(to_index(id_of(d, "z")) == 2);
  CHECK(d.user_count() == 3);
}

TEST_CASE("comments, blank lines and CRLF") {
  const auto d = parse_cascade_string("# header\n\nc1\ta b\r\n  \n#c2\tq r\nc3\tb a c\r\n");
  REQUIRE(d.cascade_count() == 2);
  CHECK(d.cascades()[1].id == "c3");
}

TEST_CASE("empty input yields an empty dataset") {
  const auto d = parse_cascade_string("");
  CHECK(d.cascade_count() == 0);
  CHECK(d.user_count() == 0);
}

TEST_CASE("parse errors name the line") {
  SUBCASE("duplicate user") {
    try {
      parse_cascade_string("ok\t1 2\nc0\t9 9\n");
      FAIL("expected ValidationError");
    } catch (const ValidationError& e) {
      CHECK(e.line() == 2);
      CHECK(e.token() == "9");
    }
  }
  SUBCASE("too few users") {
    try {
      parse_cascade_string("# x\nc0\t9\n");
      FAIL("expected ParseError");
    } catch (const ParseError& e) {
      CHECK(e.line() == 2);
    }
  }
  SUBCASE("missing tab") { CHECK_THROWS_AS(parse_cascade_string("c0 1 2\n"), ParseError); }
}

TEST_CASE("parsing against a base vocabulary keeps its ids") {
  Vocabulary base;
  base.intern("q");
  base.intern("a");
  const auto d = parse_cascade_string("c\ta b\n", base);
  CHECK(to_index(id_of(d, "a")) == 1);
  CHECK(to_index(id_of(d, "b")) == 2);
  CHECK(d.user_count() == 2);
}

TEST_CASE("infection order is a bijection onto 1..n") {
  std::mt19937_64 rng(11);
  for (int rep = 0; rep < 50; ++rep) {
    const auto d = parse_cascade_string(random_corpus(rng));
    for (const auto& c : d.cascades()) {
      std::vector<int> orders;
      for (std::size_t i = 1; i < c.users.size(); ++i) orders.push_back(*infection_order(c, c.users[i]));
      std::sort(orders.begin(), orders.end());
      for (std::size_t i = 0; i < orders.size(); ++i) CHECK(orders[i] == static_cast<int>(i + 1));
    }
  }
}

TEST_CASE("serialize(parse(text)) round-trips") {
  std::mt19937_64 rng(3);
  for (int rep = 0; rep < 50; ++rep) {
    const auto d = parse_cascade_string(random_corpus(rng));
    std::ostringstream out;
    write_cascade_file(out, d);
    const auto again = parse_cascade_string(out.str());
    REQUIRE(again.cascade_count() == d.cascade_count());
    CHECK(again.vocabulary() == d.vocabulary());
    for (std::size_t i = 0; i < d.cascade_count(); ++i) {
      CHECK(again.cascades()[i].id == d.cascades()[i].id);
      CHECK(again.cascades()[i].users == d.cascades()[i].users);
    }
  }
}

TEST_CASE("split_dataset partitions deterministically") {
  std::ostringstream text;
  for (int i = 0; i < 10; ++i) text << "c" << i << "\ts" << i << " u" << i << '\n';
  const auto d = parse_cascade_string(text.str());

  const auto a = split_dataset(d, 0.2, 7);
  const auto b = split_dataset(d, 0.2, 7);
  CHECK(a.train.cascade_count() == 8);
  CHECK(a.test.cascade_count() == 2);

  std::vector<std::string> ids;
  for (const auto* part : {&a.train, &a.test}) {
    for (const auto& c : part->cascades()) ids.push_back(c.id);
  }
  std::sort(ids.begin(), ids.end());
  std::vector<std::string> expected;
  for (const auto& c : d.cascades()) expected.push_back(c.id);
  std::sort(expected.begin(), expected.end());
  CHECK(ids == expected);

  for (std::size_t i = 0; i < a.test.cascade_count(); ++i) {
    CHECK(a.test.cascades()[i].id == b.test.cascades()[i].id);
  }
}

TEST_CASE("split_dataset rejects degenerate input") {
  const auto one = parse_cascade_string("c\ta b\n");
  CHECK_THROWS_AS(split_dataset(one, 0.5, 1), std::invalid_argument);
  const auto two = parse_cascade_string("c\ta b\nd\ta c\n");
  CHECK_THROWS_AS(split_dataset(two, 1.5, 1), std::invalid_argument);
  CHECK_THROWS_AS(split_dataset(two, 0.0, 1), std::invalid_argument);
}
