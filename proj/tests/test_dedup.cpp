#include <doctest.h>

#include <vector>

#include "dermaprep/dedup.hpp"
#include "dermaprep/error.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace dermaprep;

namespace {

Image noise(synth::Stream& s, int w, int h) {
  Image img(w, h, 3);
  for (float& v : img.data()) v = static_cast<float>(s.uniform());
  return img;
}

}  // namespace

TEST_CASE("mse") {
  synth::Stream s(1);
  const Image a = noise(s, 9, 7), b = noise(s, 9, 7);
  CHECK(mse(a, a) == 0.0);
  CHECK(mse(a, b) == doctest::Approx(oracle::mse(a, b)).epsilon(1e-13));
  CHECK(mse(Image(2, 2, 3, 0.0f), Image(2, 2, 3, 0.5f)) == 0.25);
  CHECK_THROWS_AS(mse(a, Image(9, 8, 3)), InvalidArgument);
  CHECK_THROWS_AS(mse(a, Image(9, 7, 1)), InvalidArgument);
}

TEST_CASE("nearest equals the exhaustive scan") {
  synth::Stream s(2);
  std::vector<NamedImage> corpus;
  for (int i = 0; i < 40; ++i) corpus.push_back({"t" + std::to_string(i), noise(s, 8, 8)});
  for (int g = 0; g < 20; ++g) {
    const NamedImage q{"g" + std::to_string(g), noise(s, 8, 8)};
    std::size_t best = 0;
    double best_e = oracle::mse(q.image, corpus[0].image);
    for (std::size_t i = 1; i < corpus.size(); ++i) {
      const double e = oracle::mse(q.image, corpus[i].image);
      if (e < best_e) {
        best_e = e;
        best = i;
      }
    }
    const MseRecord r = nearest(q, corpus);
    CHECK(r.generated_id == q.id);
    CHECK(r.nearest_training_id == corpus[best].id);
    CHECK(r.mse == doctest::Approx(best_e).epsilon(1e-12));
  }
  CHECK_THROWS_AS(nearest({"x", noise(s, 8, 8)}, std::span<const NamedImage>{}), InvalidArgument);
}

TEST_CASE("ties go to the lowest corpus index") {
  const Image a(4, 4, 3, 0.2f);
  const std::vector<NamedImage> corpus{{"z", Image(4, 4, 3, 0.4f)}, {"a", Image(4, 4, 3, 0.0f)},
                                       {"m", Image(4, 4, 3, 0.4f)}};
  CHECK(nearest({"g", a}, corpus).nearest_training_id == "z");
}

TEST_CASE("summary statistics, histogram and flags") {
  synth::Stream s(3);
  std::vector<MseRecord> recs;
  std::vector<double> xs;
  for (int i = 0; i < 100; ++i) {
    const double v = i % 17 == 0 ? 0.001 : s.uniform(0.01, 0.2);
    recs.push_back({"g" + std::to_string(i), "t", v});
    xs.push_back(v);
  }
  const MseSummary sum = summarize(recs, 20, 0.005);
  const auto [mean, sd] = oracle::two_pass_mean_std(xs);
  CHECK(std::abs(sum.mean - mean) <= 1e-12);
  CHECK(std::abs(sum.stddev - sd) <= 1e-12);
  std::size_t total = 0;
  for (auto c : sum.histogram.counts) total += c;
  CHECK(total == 100);
  CHECK(sum.histogram.edges.size() == 21);
  CHECK(sum.histogram.edges.front() == 0.0);
  CHECK(sum.histogram.edges.back() == *std::max_element(xs.begin(), xs.end()));
  CHECK(sum.histogram.counts.back() >= 1);  // the maximum lands in the last bin
  std::vector<std::string> want;
  for (const auto& r : recs)
    if (r.mse < 0.005) want.push_back(r.generated_id);
  CHECK(sum.flagged == want);
  CHECK(want.size() == 6);

  const std::vector<MseRecord> zeros{{"a", "t", 0.0}, {"b", "t", 0.0}};
  const MseSummary z = summarize(zeros);
  CHECK(z.histogram.counts[0] == 2);
  CHECK(z.flagged.size() == 2);
  CHECK_THROWS_AS(summarize(std::span<const MseRecord>{}), InvalidArgument);
}

TEST_CASE("mean and std rendering") {
  MseSummary s;
  s.mean = 0.08849;
  s.stddev = 0.0521;
  CHECK(format_mean_std(s) == "0.088 ± 0.052");
}
