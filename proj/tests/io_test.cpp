#include <gtest/gtest.h>

#include <cstdlib>
#include <cstring>
#include <fstream>
#include <sstream>

#include "sshlind/io.hpp"

namespace {

using namespace sshlind;

KeyValueConfig parse_text(const std::string& text, const std::string& name = "test") {
  std::istringstream in(text);
  return KeyValueConfig::parse(in, name);
}

TEST(Config, ParsesKeyValuesAndComments) {
  auto cfg = parse_text(
      "# full line comment\n"
      "\n"
      "t1 = 0.5\n"
      "  t2=1.0   # trailing comment\n"
      "name = weak coupling run\n");
  EXPECT_EQ(cfg.source(), "test");
  EXPECT_EQ(cfg.values().size(), 3u);
  EXPECT_EQ(cfg.require("t1"), "0.5");
  EXPECT_EQ(cfg.require("t2"), "1.0");
  EXPECT_EQ(cfg.require("name"), "weak coupling run");
  EXPECT_FALSE(cfg.get("missing").has_value());
}

TEST(Config, RejectsMalformedInput) {
  try {
    parse_text("t1 = 0.5\nnot a pair\n", "bad.cfg");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("bad.cfg:2"), std::string::npos);
  }
  EXPECT_THROW(parse_text("= 1\n"), ConfigError);
  try {
    parse_text("a = 1\na = 2\n");
    FAIL() << "expected ConfigError";
  } catch (const ConfigError& e) {
    EXPECT_NE(std::string(e.what()).find("duplicate key"), std::string::npos);
  }
  EXPECT_THROW(KeyValueConfig::parse_file("/nonexistent/path.cfg"), ConfigError);
}

TEST(Config, NumericParsingIsStrict) {
  auto cfg = parse_text("a = 0.25\nb = 12\nc = 1.5x\nd = nonsense\n");
  EXPECT_EQ(cfg.get_double("a"), 0.25);
  EXPECT_EQ(cfg.get_int("b"), 12);
  EXPECT_THROW(cfg.get_double("c"), ConfigError);
  EXPECT_THROW(cfg.get_int("c"), ConfigError);
  EXPECT_THROW(cfg.get_double("d"), ConfigError);
  EXPECT_EQ(cfg.get_double("missing", 7.5), 7.5);
  EXPECT_EQ(cfg.get_int("missing", 3), 3);
  EXPECT_THROW(cfg.get_double("missing"), ConfigError);
  EXPECT_THROW(cfg.require("missing"), ConfigError);
}

TEST(Config, EnvironmentOverridesFileValues) {
  auto cfg = parse_text("t1 = 0.5\n");
  ASSERT_EQ(setenv("SSHLIND_T1", "9.5", 1), 0);
  EXPECT_EQ(cfg.get_double("t1"), 9.5);
  ASSERT_EQ(unsetenv("SSHLIND_T1"), 0);
  EXPECT_EQ(cfg.get_double("t1"), 0.5);
}

TEST(Config, ModelRoundTrip) {
  auto m = model_from_config(parse_text(
      "t1 = 0.5\nt2 = 1.0\nn_cells = 6\n"
      "left_kind = loss\nleft_gamma = 0.2\n"
      "right_kind = gain\nright_gamma = 1.5\n"));
  EXPECT_EQ(m.t1, 0.5);
  EXPECT_EQ(m.t2, 1.0);
  EXPECT_EQ(m.n_cells, 6);
  ASSERT_NE(m.dissipator(BoundarySide::left), nullptr);
  EXPECT_EQ(m.dissipator(BoundarySide::left)->kind, DissipatorKind::loss);
  EXPECT_EQ(m.dissipator(BoundarySide::left)->strength, 0.2);
  ASSERT_NE(m.dissipator(BoundarySide::right), nullptr);
  EXPECT_EQ(m.dissipator(BoundarySide::right)->kind, DissipatorKind::gain);
  EXPECT_EQ(m.dissipator(BoundarySide::right)->strength, 1.5);

  auto closed = model_from_config(parse_text("t1 = 0.5\nt2 = 1.0\nn_cells = 2\n"));
  EXPECT_TRUE(closed.dissipators.empty());

  EXPECT_THROW(model_from_config(parse_text(
                   "t1 = 0.5\nt2 = 1.0\nn_cells = 2\nleft_gamma = 0.2\n")),
               ConfigError);
  EXPECT_THROW(model_from_config(parse_text(
                   "t1 = 0.5\nt2 = 1.0\nn_cells = 2\nleft_kind = sink\n"
                   "left_gamma = 0.2\n")),
               ConfigError);
  EXPECT_THROW(model_from_config(parse_text(
                   "t1 = 0.5\nt2 = 1.0\nn_cells = 2\nleft_kind = none\n"
                   "left_gamma = 0.2\n")),
               ConfigError);
}

TEST(Format, DoublesRoundTripExactly) {
  for (double x : {1.0 / 3.0, 1e-300, -0.0, 12345.678, 5.669497e-3, 2.0}) {
    std::string s = fmt_double(x);
    char* end = nullptr;
    double back = std::strtod(s.c_str(), &end);
    EXPECT_EQ(*end, '\0');
    EXPECT_EQ(std::memcmp(&back, &x, sizeof x), 0) << s;
  }
  EXPECT_EQ(fmt_fixed(1.23456, 2), "1.23");
}

TEST(Manifest, BuilderKeepsOrder) {
  RunManifest m;
  m.command = "demo";
  m.add("alpha", 1).add("beta", 0.5).add("note", "x");
  ASSERT_EQ(m.entries.size(), 3u);
  EXPECT_EQ(m.entries[0].first, "alpha");
  EXPECT_EQ(m.entries[0].second, "1");
  EXPECT_EQ(m.entries[1].second, "0.5");

  RunManifest mm;
  mm.add_model(make_model(0.5, 1.0, 3,
                          {{BoundarySide::left, DissipatorKind::loss, 0.2}}));
  ASSERT_EQ(mm.entries.size(), 7u);
  EXPECT_EQ(mm.entries[3], (std::pair<std::string, std::string>{"left_kind", "loss"}));
  EXPECT_EQ(mm.entries[5], (std::pair<std::string, std::string>{"right_kind", "none"}));
  EXPECT_EQ(mm.entries[6], (std::pair<std::string, std::string>{"right_gamma", "0"}));
}

TEST(Tables, RejectRaggedRows) {
  Table t;
  t.columns = {"a", "b"};
  t.add_row({"1", "2"});
  EXPECT_THROW(t.add_row({"1"}), std::invalid_argument);
  EXPECT_THROW(t.add_row({"1", "2", "3"}), std::invalid_argument);
}

TEST(Writers, TsvLayoutIsExact) {
  RunManifest m;
  m.command = "demo";
  m.add("alpha", 1).add("beta", "x");
  Table t;
  t.columns = {"a", "b"};
  t.add_row({"1", "2"});
  t.add_row({"3", "4"});
  std::ostringstream out;
  write_tsv(out, m, t);
  EXPECT_EQ(out.str(),
            "# tool\tsshlind\n"
            "# command\tdemo\n"
            "# alpha\t1\n"
            "# beta\tx\n"
            "a\tb\n"
            "1\t2\n"
            "3\t4\n");
}

TEST(Writers, JsonParsesBack) {
  RunManifest m;
  m.command = "demo";
  m.add("gap", 5.669497e-3);
  Table t;
  t.columns = {"n", "gap"};
  t.add_row({"6", "0.005669497"});
  std::ostringstream out;
  write_json(out, m, t);
  auto doc = nlohmann::json::parse(out.str());
  EXPECT_EQ(doc["manifest"]["tool"], "sshlind");
  EXPECT_EQ(doc["manifest"]["command"], "demo");
  EXPECT_DOUBLE_EQ(std::stod(doc["manifest"]["gap"].get<std::string>()),
                   5.669497e-3);
  ASSERT_EQ(doc["columns"].size(), 2u);
  EXPECT_EQ(doc["columns"][1], "gap");
  ASSERT_EQ(doc["rows"].size(), 1u);
  EXPECT_EQ(doc["rows"][0][0], "6");
}

TEST(Writers, OutputIsDeterministic) {
  RunManifest m;
  m.command = "demo";
  m.add("x", 0.1);
  Table t;
  t.columns = {"v"};
  t.add_row({"1"});
  std::ostringstream a, b, ja, jb;
  write_tsv(a, m, t);
  write_tsv(b, m, t);
  write_json(ja, m, t);
  write_json(jb, m, t);
  EXPECT_EQ(a.str(), b.str());
  EXPECT_EQ(ja.str(), jb.str());
}

TEST(Writers, FileDispatchAndErrors) {
  RunManifest m;
  m.command = "demo";
  Table t;
  t.columns = {"v"};
  t.add_row({"1"});
  std::string dir = ::testing::TempDir();
  write_table_file(dir + "/io_test_out.tsv", "tsv", m, t);
  write_table_file(dir + "/io_test_out.json", "json", m, t);
  std::ifstream tsv(dir + "/io_test_out.tsv"), json(dir + "/io_test_out.json");
  EXPECT_TRUE(tsv.good());
  EXPECT_TRUE(json.good());
  std::string first;
  std::getline(tsv, first);
  EXPECT_EQ(first, "# tool\tsshlind");

  EXPECT_THROW(write_table_file(dir + "/x.xml", "xml", m, t), std::invalid_argument);
  EXPECT_THROW(write_table_file("/nonexistent/dir/x.tsv", "tsv", m, t),
               std::runtime_error);
}

}  // namespace
