#include <doctest.h>

#include <sstream>

#include "dermaprep/archcheck.hpp"
#include "oracles.hpp"

using namespace dermaprep;
using namespace dermaprep::arch;

namespace {

const std::string kArchDir = std::string(DERMAPREP_SOURCE_DIR) + "/arch/";

}  // namespace

TEST_CASE("shape formulas on single examples") {
  CHECK(infer_conv(380, 3, 1, 0, 1) == 378);
  CHECK(infer_conv(44, 3, 1, 0, 2) == 40);
  CHECK(infer_conv(256, 4, 2, 1, 1) == 128);
  CHECK(infer_conv(8, 4, 1, 1, 1) == 7);
  CHECK(infer_transconv(1, 4, 1, 0, 1) == 4);
  CHECK(infer_transconv(4, 4, 2, 1, 1) == 8);
  CHECK(infer_transconv(20, 3, 1, 0, 4) == 28);
  CHECK(infer_upconv(44, 2, 3, 1, 1) == 88);
  CHECK_THROWS_AS(infer_conv(2, 5, 1, 0, 1), ShapeError);
  CHECK_THROWS_AS(infer_conv(8, 0, 1, 0, 1), InvalidArgument);
  CHECK_THROWS_AS(infer_transconv(1, 1, 1, 1, 1), ShapeError);
}

TEST_CASE("conv and transposed conv agree with the sliding-window simulator") {
  int checked = 0;
  for (int in = 1; in <= 64; ++in)
    for (int k = 1; k <= 5; ++k)
      for (int s = 1; s <= 3; ++s)
        for (int p = 0; p <= 2; ++p)
          for (int d = 1; d <= 4; ++d) {
            const int want = oracle::conv_positions(in, k, s, p, d);
            if (want > 0)
              CHECK(infer_conv(in, k, s, p, d) == want);
            else
              CHECK_THROWS_AS(infer_conv(in, k, s, p, d), ShapeError);
            const int twant = oracle::transconv_extent(in, k, s, p, d);
            if (twant > 0)
              CHECK(infer_transconv(in, k, s, p, d) == twant);
            else
              CHECK_THROWS_AS(infer_transconv(in, k, s, p, d), ShapeError);
            ++checked;
          }
  CHECK(checked == 64 * 5 * 3 * 3 * 4);
}

TEST_CASE("parameter counts") {
  LayerSpec conv;
  conv.kind = LayerKind::conv;
  conv.out_channels = 64;
  conv.kernel = 3;
  CHECK(param_count(conv, 7) == 7 * 64 * 9 + 64);
  CHECK(param_count(conv, 7, false) == 7 * 64 * 9);
  LayerSpec pool;
  pool.kind = LayerKind::maxpool;
  CHECK(param_count(pool, 64) == 0);
}

TEST_CASE("parser accepts the grammar and reports line numbers") {
  const ArchFile f = parse_arch(
      "# comment\n"
      "network tiny\n"
      "input 3 32 32\n"
      "conv 8 k3x3 s1 p1 expect 8 32 32\n"
      "maxpool k2x2 s2 expect 8 16 16   # trailing\n"
      "upsample 2 expect 8 32 32\n"
      "upconv 2 4 k3 s1 p1 d1\n"
      "transconv 2 k3x3 s2 p1 d2\n",
      "t.arch");
  REQUIRE(f.networks.size() == 1);
  const ArchSpec& a = f.networks[0];
  CHECK(a.name == "tiny");
  CHECK(a.layers.size() == 5);
  CHECK(a.layers[0].source_line == 4);
  CHECK(a.layers[3].upsample_factor == 2);
  CHECK(a.layers[4].dilation == 2);
  const ShapeTrace t = trace(a);
  CHECK(t.all_match());
  CHECK(t.rows[3].inferred == TensorShape{4, 64, 64});
  CHECK(t.rows[4].inferred == TensorShape{2, 129, 129});

  auto line_of = [](const std::string& text) {
    try {
      parse_arch(text, "bad.arch");
    } catch (const ParseError& e) {
      return e.line();
    }
    return -1;
  };
  CHECK(line_of("input 3 8 8\nconv 64 k3x3\n") == 2);
  CHECK(line_of("input 3 8 8\nconv 4 k3x3 s1 p0\nbogus 1\n") == 3);
  CHECK(line_of("input 3 8 8\nconv 4 k3x5 s1 p0\n") == 2);
  CHECK(line_of("input 3 8 8\nconv 4 k3x3 s0 p0\n") == 2);
  CHECK(line_of("conv 4 k3x3 s1 p0\n") == 1);
  CHECK(line_of("input 3 8 8\nconv 4 k3 s1 p0 share g\n") == 2);
  CHECK(line_of("input 3 8 8\nconv 4 k3 s1 p0 expect 4 6\n") == 2);
  CHECK(line_of("network a x0\n") == 1);
  CHECK(line_of("") == 0);
}

TEST_CASE("declared shapes re-synchronise the trace") {
  const ArchFile f = parse_arch(
      "input 1 16 16\n"
      "conv 2 k3 s1 p0 expect 2 10 10\n"  // wrong: 14x14
      "conv 2 k3 s1 p0 expect 2 8 8\n");
  const ShapeTrace t = trace(f.networks[0]);
  CHECK(t.mismatch_count() == 1);
  CHECK_FALSE(t.rows[0].match);
  CHECK(t.rows[0].inferred == TensorShape{2, 14, 14});
  CHECK(t.rows[1].input == TensorShape{2, 10, 10});
  CHECK(t.rows[1].match);
}

TEST_CASE("collapsing layer throws with its index") {
  const ArchFile f = parse_arch("input 1 4 4\nconv 2 k3 s1 p0\nconv 2 k3 s1 p0\n");
  try {
    trace(f.networks[0]);
    FAIL("expected ShapeError");
  } catch (const ShapeError& e) {
    CHECK(e.layer_index() == 1);
  }
}

TEST_CASE("coupling") {
  const std::string base =
      "group g\n"
      "network a\ninput 3 8 8\nconv 4 k3 s1 p1 share g\n"
      "network b\ninput 3 8 8\nconv 4 k3 s1 p1 share g\n"
      "network c\ninput 3 8 8\nconv 4 k3 s1 p1 share g\n";
  CHECK(verify(parse_arch(base)).ok());

  const ArchFile bad = parse_arch(
      "group g\n"
      "network a\ninput 3 8 8\nconv 4 k3 s1 p1 share g\n"
      "network b\ninput 3 8 8\nconv 4 k3 s1 p1 share g\n"
      "network c\ninput 3 8 8\nconv 5 k3 s1 p1 share g\n");
  const VerifyResult r = verify(bad);
  REQUIRE(r.coupling);
  REQUIRE(r.coupling->violations.size() == 1);
  CHECK(r.coupling->violations[0].network == "c");
  CHECK(r.coupling->violations[0].source_line == 10);
  CHECK_FALSE(r.ok());

  // Same weights fed from a different channel count also break sharing.
  const ArchFile chan = parse_arch(
      "group g\n"
      "network a\ninput 3 8 8\nconv 4 k3 s1 p1 share g\n"
      "network b\ninput 2 8 8\nconv 4 k3 s1 p1 share g\n"
      "network c\ninput 3 8 8\nconv 4 k3 s1 p1 share g\n");
  CHECK(verify(chan).coupling->violations.size() == 1);

  ArchSpec lone = parse_arch("input 1 4 4\nconv 1 k1 s1 p0\n").networks[0];
  lone.layers[0].sharing_group = "nowhere";
  const std::vector<ArchSpec> two{lone, lone};
  const std::vector<std::string> declared{"g"};
  CHECK_THROWS_AS(verify_coupling(two, &declared), ConfigError);
}

TEST_CASE("replicated networks count a bad row once") {
  const ArchFile f = parse_arch(
      "network d x3\ninput 1 8 8\nconv 1 k4 s1 p1 expect 1 4 4\n");
  CHECK(f.networks.size() == 3);
  CHECK(f.networks[2].name == "d_3");
  const VerifyResult r = verify(f);
  CHECK(r.mismatched_rows == 1);
  std::ostringstream os;
  print_report(os, r);
  CHECK(os.str().find("MISMATCH line 3") != std::string::npos);
}

TEST_CASE("shipped architecture files") {
  const VerifyResult t1 = verify(load_arch(kArchDir + "table1.arch"));
  CHECK(t1.ok());
  CHECK(t1.traces[0].rows.size() == 27);
  CHECK(t1.traces[0].rows.back().inferred == TensorShape{1, 380, 380});

  const VerifyResult gen = verify(load_arch(kArchDir + "table2_gen.arch"));
  CHECK(gen.ok());
  CHECK(gen.traces[0].rows.back().inferred == TensorShape{3, 256, 256});

  const VerifyResult disc = verify(load_arch(kArchDir + "table2_disc.arch"));
  CHECK(disc.mismatched_rows == 1);
  const auto& row = disc.traces[0].rows[5];
  CHECK_FALSE(row.match);
  CHECK(row.inferred == TensorShape{512, 7, 7});
  CHECK(row.layer.declared == TensorShape{512, 4, 4});

  const VerifyResult supp = verify(load_arch(kArchDir + "supp_table3.arch"));
  REQUIRE(supp.coupling);
  CHECK(supp.coupling->ok());
  CHECK(supp.mismatched_rows == 1);
  CHECK_THROWS_AS(load_arch(kArchDir + "nope.arch"), IoError);
}
