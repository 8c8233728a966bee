// Copyright 2026 The amm-align Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <filesystem>
#include <limits>

#include <gtest/gtest.h>

#include "amm/captions.hpp"
#include "amm/checkpoint.hpp"
#include "amm/embedding_store.hpp"
#include "amm/errors.hpp"
#include "amm/io.hpp"
#include "amm/similarity.hpp"
#include "amm/synthetic.hpp"
#include "test_util.hpp"

namespace amm {
namespace {

namespace fs = std::filesystem;

class TempDir {
 public:
  TempDir() {
    path_ = fs::temp_directory_path() /
            ("amm_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) + "_" +
             ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::remove_all(path_);
    fs::create_directories(path_);
  }
  ~TempDir() { fs::remove_all(path_); }
  const fs::path& path() const { return path_; }

 private:
  fs::path path_;
};

EmbeddingStore sample_store(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  EmbeddingStore s;
  for (std::size_t i = 0; i < n; ++i) s.ids.push_back("item-" + std::to_string(i) + "-\xc3\xa9");
  s.matrix = testing::random_matrix(n, d, rng);
  return s;
}

// ---- EMB1 ----

TEST(EmbeddingStoreFormat, RoundTripIsBitExact) {
  TempDir dir;
  const auto store = sample_store(17, 5, 3);
  store_save(store, dir.path() / "a.emb");
  const auto loaded = store_load(dir.path() / "a.emb");
  EXPECT_EQ(loaded, store);
  EXPECT_EQ(encode_store(loaded), read_file(dir.path() / "a.emb"));
}

TEST(EmbeddingStoreFormat, HeaderLayoutIsPinned) {
  EmbeddingStore s;
  s.ids = {"ab"};
  s.matrix = Matrix{{1.0}};
  const std::string bytes = encode_store(s);
  ASSERT_EQ(bytes.size(), 4u + 4 + 8 + 8 + 4 + 2 + 8);
  EXPECT_EQ(bytes.substr(0, 4), "EMB1");
  EXPECT_EQ(bytes[4], 1);  // version, little-endian
  EXPECT_EQ(bytes[8], 1);  // n
  EXPECT_EQ(bytes[16], 1);  // d
  EXPECT_EQ(bytes[24], 2);  // id length
  EXPECT_EQ(bytes.substr(28, 2), "ab");
  EXPECT_EQ(static_cast<unsigned char>(bytes[37]), 0x3F);  // 1.0 = 0x3FF0000000000000
  EXPECT_EQ(static_cast<unsigned char>(bytes[36]), 0xF0);
}

TEST(EmbeddingStoreFormat, EmptyStoreRoundTrips) {
  EmbeddingStore s;
  s.matrix = Matrix(0, 7);
  const auto back = decode_store(encode_store(s));
  EXPECT_EQ(back.size(), 0u);
  EXPECT_EQ(back.dim(), 7u);
}

TEST(EmbeddingStoreFormat, WrongMagicIsFormatError) {
  std::string bytes = encode_store(sample_store(2, 2, 1));
  bytes[0] = 'X';
  EXPECT_THROW(decode_store(bytes), FormatError);
}

TEST(EmbeddingStoreFormat, WrongVersionIsFormatError) {
  std::string bytes = encode_store(sample_store(2, 2, 1));
  bytes[4] = 2;
  EXPECT_THROW(decode_store(bytes), FormatError);
}

TEST(EmbeddingStoreFormat, TrailingBytesAreFormatError) {
  std::string bytes = encode_store(sample_store(2, 2, 1));
  bytes.push_back('\0');
  EXPECT_THROW(decode_store(bytes), FormatError);
}

TEST(EmbeddingStoreFormat, TruncationReportsByteOffset) {
  const std::string bytes = encode_store(sample_store(3, 4, 1));
  for (std::size_t cut : {std::size_t{6}, std::size_t{30}, bytes.size() - 1}) {
    try {
      decode_store(std::string_view(bytes).substr(0, cut));
      FAIL() << "expected IoError at cut " << cut;
    } catch (const IoError& e) {
      EXPECT_NE(std::string(e.what()).find("offset"), std::string::npos);
    }
  }
}

TEST(EmbeddingStoreFormat, DuplicateIdsAndNonFiniteValuesRejected) {
  auto dup = sample_store(2, 2, 1);
  dup.ids[1] = dup.ids[0];
  EXPECT_THROW(encode_store(dup), ValidationError);

  auto nan = sample_store(2, 2, 1);
  std::string bytes = encode_store(nan);
  // Overwrite the last payload double with NaN.
  const double q = std::numeric_limits<double>::quiet_NaN();
  const auto bits = std::bit_cast<std::uint64_t>(q);
  for (int i = 0; i < 8; ++i) bytes[bytes.size() - 8 + i] = static_cast<char>((bits >> (8 * i)) & 0xFF);
  EXPECT_THROW(decode_store(bytes), ValidationError);
}

TEST(EmbeddingStoreFormat, MissingFileIsIoError) {
  EXPECT_THROW(store_load("/nonexistent/dir/x.emb"), IoError);
}

// ---- manifest ----

TEST(Manifest, JsonRoundTripAndValidation) {
  TempDir dir;
  PairManifest m;
  m.pairs = {{"p0", "v0", "c0", Split::train}, {"p1", "v1", "c1", Split::test}};
  manifest_save(m, dir.path() / "m.json");
  EXPECT_EQ(manifest_load(dir.path() / "m.json"), m);
  EXPECT_EQ(m.select(Split::test).size(), 1u);

  m.pairs.push_back({"p0", "v2", "c2", Split::eval});
  EXPECT_THROW(m.validate(), ValidationError);
}

TEST(Manifest, ReferencesMustExist) {
  const auto x = sample_store(2, 2, 1);
  const auto y = sample_store(2, 2, 2);
  PairManifest m;
  m.pairs = {{"p0", x.ids[0], y.ids[0], Split::train}};
  EXPECT_NO_THROW(m.check_references(x, y));
  m.pairs.push_back({"p1", "missing", y.ids[1], Split::train});
  EXPECT_THROW(m.check_references(x, y), ValidationError);
}

TEST(Manifest, MalformedJsonIsFormatError) {
  EXPECT_THROW(manifest_from_json(nlohmann::json::parse(R"({"pair_id": "p"})")), FormatError);
  EXPECT_THROW(manifest_from_json(nlohmann::json::parse(
                   R"([{"pair_id": "p", "x_id": "a", "y_id": "b", "split": "dev"}])")),
               FormatError);
}

// ---- CKP1 ----

TEST(CheckpointFormat, RoundTripIsBitExact) {
  TempDir dir;
  Rng rng(9);
  Checkpoint ckpt{head_init({4, 3, 2}, rng), head_init({5, 3, 2}, rng), {{"seed", 7}}};
  checkpoint_save(ckpt, dir.path() / "c.ckp");
  const auto back = checkpoint_load(dir.path() / "c.ckp");
  EXPECT_EQ(back, ckpt);
  EXPECT_EQ(encode_checkpoint(back), read_file(dir.path() / "c.ckp"));
}

TEST(CheckpointFormat, CorruptionRejected) {
  Rng rng(9);
  const Checkpoint ckpt{head_init({2, 2, 2}, rng), head_init({2, 2, 2}, rng), {}};
  std::string bytes = encode_checkpoint(ckpt);
  std::string bad_magic = bytes;
  bad_magic[3] = '2';
  EXPECT_THROW(decode_checkpoint(bad_magic), FormatError);
  EXPECT_THROW(decode_checkpoint(bytes + "x"), FormatError);
  EXPECT_THROW(decode_checkpoint(std::string_view(bytes).substr(0, bytes.size() - 3)), IoError);
}

// ---- synthetic generator ----

TEST(Synthetic, NoiselessIdentityMapsGiveEqualModalities) {
  SyntheticSpec spec;
  spec.n_pairs = 50;
  spec.d_latent = spec.d_x = spec.d_y = 6;
  spec.noise_sigma = 0.0;
  spec.identity_maps = true;
  const auto data = synth_generate(spec);
  EXPECT_EQ(data.x.matrix, data.y.matrix);
}

TEST(Synthetic, DeterministicPerSeed) {
  SyntheticSpec spec;
  spec.n_pairs = 100;
  const auto a = synth_generate(spec);
  const auto b = synth_generate(spec);
  EXPECT_EQ(encode_store(a.x), encode_store(b.x));
  EXPECT_EQ(encode_store(a.y), encode_store(b.y));
  EXPECT_EQ(a.manifest, b.manifest);
  spec.seed = 8;
  EXPECT_NE(synth_generate(spec).x, a.x);
}

TEST(Synthetic, LargerDrawExtendsSmallerDraw) {
  SyntheticSpec spec;
  spec.n_pairs = 30;
  const auto small = synth_generate(spec);
  spec.n_pairs = 60;
  const auto large = synth_generate(spec);
  for (std::size_t i = 0; i < 30; ++i) {
    for (std::size_t c = 0; c < small.x.dim(); ++c) EXPECT_EQ(small.x.matrix(i, c), large.x.matrix(i, c));
    for (std::size_t c = 0; c < small.y.dim(); ++c) EXPECT_EQ(small.y.matrix(i, c), large.y.matrix(i, c));
  }
}

TEST(Synthetic, SplitsAreEightyTenTenByIndex) {
  SyntheticSpec spec;
  spec.n_pairs = 2000;
  const auto data = synth_generate(spec);
  EXPECT_EQ(data.manifest.select(Split::train).size(), 1600u);
  EXPECT_EQ(data.manifest.select(Split::eval).size(), 200u);
  EXPECT_EQ(data.manifest.select(Split::test).size(), 200u);
  EXPECT_EQ(data.manifest.pairs[1599].split, Split::train);
  EXPECT_EQ(data.manifest.pairs[1600].split, Split::eval);
  EXPECT_EQ(data.manifest.pairs[1800].split, Split::test);
  EXPECT_NO_THROW(data.manifest.check_references(data.x, data.y));
}

TEST(Synthetic, MixingMapsHaveOrthonormalColumns) {
  Rng rng(5);
  const Matrix q = random_orthonormal_columns(12, 5, rng);
  const Matrix gram = transposed_matmul(q, q);
  EXPECT_LT(testing::max_abs_diff(gram, Matrix::identity(5)), 1e-12);
}

double mean_diag_minus_offdiag(const Matrix& s) {
  double diag = 0.0, off = 0.0;
  const std::size_t n = s.rows();
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) (i == j ? diag : off) += s(i, j);
  return diag / static_cast<double>(n) - off / static_cast<double>(n * (n - 1));
}

TEST(Synthetic, PairedItemsAreMoreSimilarThanUnpaired) {
  SyntheticSpec spec;
  spec.n_pairs = 1000;
  spec.d_latent = spec.d_x = spec.d_y = 16;
  spec.identity_maps = true;
  spec.noise_sigma = 0.5;
  const auto data = synth_generate(spec);
  const auto s = similarity_forward(data.x.matrix, data.y.matrix);
  EXPECT_GT(mean_diag_minus_offdiag(s.s), 0.0);
}

TEST(Synthetic, LessNoiseGivesLargerSimilarityGap) {
  SyntheticSpec spec;
  spec.n_pairs = 1000;
  spec.d_latent = spec.d_x = spec.d_y = 16;
  spec.identity_maps = true;
  double previous = std::numeric_limits<double>::infinity();
  for (double sigma : {0.1, 0.5, 1.0, 2.0}) {
    spec.noise_sigma = sigma;
    const auto data = synth_generate(spec);
    const auto s = similarity_forward(l2_normalize_rows(data.x.matrix), l2_normalize_rows(data.y.matrix));
    const double gap = mean_diag_minus_offdiag(s.s);
    EXPECT_LT(gap, previous) << "sigma " << sigma;
    previous = gap;
  }
}

TEST(Synthetic, InvalidSpecsRejected) {
  SyntheticSpec spec;
  spec.n_pairs = 0;
  EXPECT_THROW(synth_generate(spec), ArgumentError);
  spec = {};
  spec.d_x = 8;  // below d_latent = 16
  EXPECT_THROW(synth_generate(spec), ArgumentError);
  spec = {};
  spec.identity_maps = true;
  EXPECT_THROW(synth_generate(spec), ArgumentError);
  spec = {};
  spec.noise_sigma = -1.0;
  EXPECT_THROW(synth_generate(spec), ArgumentError);
}

TEST(Synthetic, CaptionWordsAverageToCaptionVector) {
  SyntheticSpec spec;
  spec.n_pairs = 20;
  spec.caption_words = 4;
  const auto data = synth_generate(spec);
  ASSERT_TRUE(data.y_words.has_value());
  const auto grouped = group_caption_words(*data.y_words);
  ASSERT_EQ(grouped.size(), 20u);
  const auto yi = data.y.index();
  for (const auto& [id, words] : grouped) {
    EXPECT_GE(words.rows(), 1u);
    EXPECT_LE(words.rows(), 7u);
    Rng unused(0);
    const auto mean = pool_caption_words(words, 10, unused, PoolingMode::eval);
    const auto row = data.y.matrix.row(yi.at(id));
    for (std::size_t c = 0; c < mean.size(); ++c) EXPECT_EQ(mean[c], row[c]);
  }
}

// ---- caption pooling ----

TEST(CaptionPooling, ExhaustiveDrawIsFullMean) {
  Rng rng(1);
  CaptionRecord rec;
  rec.word_vectors = testing::random_matrix(10, 3, rng);
  Rng unused(0);
  const auto full = pool_caption_words(*rec.word_vectors, 10, unused, PoolingMode::eval);
  const auto drawn = sample_caption_words(rec, 10, rng, PoolingMode::train);
  for (std::size_t c = 0; c < 3; ++c) EXPECT_NEAR(drawn[c], full[c], 1e-14);
}

TEST(CaptionPooling, SingleWordCollapsesUnderReplacement) {
  Rng rng(2);
  CaptionRecord rec;
  rec.word_vectors = Matrix{{0.25, -1.5, 3.0}};
  const auto out = sample_caption_words(rec, 10, rng, PoolingMode::train);
  EXPECT_EQ(out, (std::vector<double>{0.25, -1.5, 3.0}));
}

TEST(CaptionPooling, EvalModeIgnoresRng) {
  Rng data_rng(3);
  CaptionRecord rec;
  rec.word_vectors = testing::random_matrix(25, 4, data_rng);
  Rng a(1), b(999);
  EXPECT_EQ(sample_caption_words(rec, 10, a, PoolingMode::eval),
            sample_caption_words(rec, 10, b, PoolingMode::eval));
}

TEST(CaptionPooling, TrainModeSamplesSubsets) {
  Rng data_rng(3);
  CaptionRecord rec;
  rec.word_vectors = testing::random_matrix(25, 4, data_rng);
  Rng a(1), b(2);
  EXPECT_NE(sample_caption_words(rec, 10, a, PoolingMode::train),
            sample_caption_words(rec, 10, b, PoolingMode::train));
}

TEST(CaptionPooling, MissingWordVectorsThrow) {
  Rng rng(0);
  CaptionRecord rec;
  EXPECT_THROW(sample_caption_words(rec, 10, rng, PoolingMode::train), ArgumentError);
  rec.word_vectors = Matrix(0, 3);
  EXPECT_THROW(sample_caption_words(rec, 10, rng, PoolingMode::eval), ArgumentError);
}

// ---- caption QC ----

CaptionRecord caption(std::string_view text, double seconds) {
  CaptionRecord rec;
  rec.words = tokenize(text);
  rec.duration_s = seconds;
  return rec;
}

TEST(CaptionQc, TooFewWords) {
  std::unordered_set<std::string> seen;
  EXPECT_EQ(validate_caption(caption("a dog runs fast", 5.0), seen).reason, QcFailure::word_count);
}

TEST(CaptionQc, TooShort) {
  std::unordered_set<std::string> seen;
  EXPECT_EQ(validate_caption(caption("a man is riding a bike down hill", 2.9), seen).reason,
            QcFailure::duration);
}

TEST(CaptionQc, RepeatedTranscript) {
  std::unordered_set<std::string> seen;
  const auto rec = caption("a man is riding a bike down hill", 5.0);
  EXPECT_TRUE(validate_caption(rec, seen).pass());
  EXPECT_EQ(validate_caption(caption("A  man is RIDING a bike\tdown hill", 5.0), seen).reason,
            QcFailure::uniqueness);
}

TEST(CaptionQc, BoundariesAreInclusive) {
  std::unordered_set<std::string> seen;
  EXPECT_TRUE(validate_caption(caption("one two three four five six seven eight", 3.0), seen).pass());
  EXPECT_TRUE(validate_caption(caption("exactly five words right here", 3.0), seen).pass());
}

TEST(CaptionQc, ChecksRunInOrderAndFailuresAreNotRemembered) {
  std::unordered_set<std::string> seen;
  // Short on both words and time: word count reported first.
  EXPECT_EQ(validate_caption(caption("too short", 1.0), seen).reason, QcFailure::word_count);
  const auto rec = caption("the same words spoken too quickly", 1.0);
  EXPECT_EQ(validate_caption(rec, seen).reason, QcFailure::duration);
  EXPECT_TRUE(seen.empty());
  EXPECT_EQ(validate_caption(rec, seen).reason, QcFailure::duration);
}

TEST(CaptionQc, ParsesJsonLines) {
  const auto rec = parse_caption_record(R"({"id": "r1", "transcript": " a  b c ", "duration_s": 4})");
  EXPECT_EQ(rec.id, "r1");
  EXPECT_EQ(rec.words, (std::vector<std::string>{"a", "b", "c"}));
  EXPECT_EQ(rec.duration_s, 4.0);
  EXPECT_THROW(parse_caption_record("{not json"), FormatError);
  EXPECT_THROW(parse_caption_record(R"({"id": "r1"})"), FormatError);
  EXPECT_THROW(parse_caption_record(R"({"id": "r", "transcript": "x", "duration_s": -1})"),
               ValidationError);
}

}  // namespace
}  // namespace amm
