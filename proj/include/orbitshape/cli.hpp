#pragma once

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <filesystem>
#include <map>
#include <ostream>
#include <string>
#include <thread>
#include <vector>

#include "orbitshape/equivalence.hpp"
#include "orbitshape/errors.hpp"
#include "orbitshape/geometry.hpp"
#include "orbitshape/invariants.hpp"
#include "orbitshape/io.hpp"
#include "orbitshape/linalg.hpp"
#include "orbitshape/random.hpp"
#include "orbitshape/selftest.hpp"

namespace orbitshape::cli {

using io::Json;

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitNegative = 1;  // not equivalent, or a self-test property failed
inline constexpr int kExitError = 2;

inline std::string to_string(GroupTag g) {
  switch (g) {
    case GroupTag::Motion: return "motion";
    case GroupTag::ProperMotion: return "proper";
    case GroupTag::Similarity: return "similarity";
  }
  return "?";
}

inline std::string to_string(NormalizationScheme s) {
  switch (s) {
    case NormalizationScheme::MaxAxis: return "max";
    case NormalizationScheme::MeanAxis: return "mean";
    case NormalizationScheme::GeomMeanAxis: return "gmean";
  }
  return "?";
}

inline const std::map<std::string, GroupTag> kGroups = {
    {"motion", GroupTag::Motion}, {"proper", GroupTag::ProperMotion}, {"similarity", GroupTag::Similarity}};
inline const std::map<std::string, NormalizationScheme> kSchemes = {{"max", NormalizationScheme::MaxAxis},
                                                                    {"mean", NormalizationScheme::MeanAxis},
                                                                    {"gmean", NormalizationScheme::GeomMeanAxis}};

inline std::string error_kind(const std::exception& e) {
  if (dynamic_cast<const ShapeMismatch*>(&e)) return "ShapeMismatch";
  if (dynamic_cast<const DimensionMismatch*>(&e)) return "DimensionMismatch";
  if (dynamic_cast<const DegenerateImage*>(&e)) return "DegenerateImage";
  if (dynamic_cast<const ParseError*>(&e)) return "ParseError";
  if (dynamic_cast<const SingularLinearPart*>(&e)) return "SingularLinearPart";
  if (dynamic_cast<const ConvergenceFailure*>(&e)) return "ConvergenceFailure";
  if (dynamic_cast<const UnsupportedDimension*>(&e)) return "UnsupportedDimension";
  if (dynamic_cast<const InvalidArgument*>(&e)) return "InvalidArgument";
  return "Error";
}

struct Common {
  GroupTag group = GroupTag::Motion;
  NormalizationScheme scheme = NormalizationScheme::GeomMeanAxis;
  double tol = kDefaultEquivalenceTolerance;
  double tol_rank = kDefaultRankTolerance;
  double tol_group = kDefaultGroupTolerance;
  bool header = false;
};

inline Json tolerances(const Common& c) {
  return Json{{"eq", c.tol}, {"rank", c.tol_rank}, {"group", c.tol_group}};
}

inline Json blocks_to_json(const MultiplicityBlocks& blocks) {
  Json out = Json::array();
  for (const auto& b : blocks.blocks) out.push_back(Json{{"value", b.value}, {"multiplicity", b.multiplicity}});
  return out;
}

inline Json cmd_invariant(const std::string& path, const Common& c, bool full_gram) {
  const io::ImageData data = io::read_image(path, c.header);
  const EllipsoidSpectrum spectrum = ellipsoid_spectrum(data.image, c.tol_group, c.tol_rank);
  Json rec{{"command", "invariant"},
           {"inputs", Json::array({path})},
           {"tolerances", Json{{"rank", c.tol_rank}, {"group", c.tol_group}}},
           {"n", data.image.n()},
           {"k", data.image.k()},
           {"centroid", io::to_json(centroid(data.image))},
           {"axis_lengths", io::to_json(spectrum.axis_lengths)},
           {"multiplicity_blocks", blocks_to_json(spectrum.blocks)},
           {"zero_count", spectrum.blocks.zero_count},
           {"rank", numerical_rank(spectrum.axis_lengths, c.tol_rank)}};
  if (data.labels) rec["labels"] = *data.labels;
  if (full_gram) rec["gram"] = io::to_json(gram_invariant(data.image).gram());
  return rec;
}

inline bool decide(const LabeledImage& a, const LabeledImage& b, const Common& c) {
  switch (c.group) {
    case GroupTag::Motion: return motion_equivalent(a, b, c.tol);
    case GroupTag::ProperMotion: return proper_motion_equivalent(a, b, c.tol, c.tol_rank);
    case GroupTag::Similarity: return similarity_equivalent(a, b, c.scheme, c.tol);
  }
  return false;
}

inline Json cmd_compare(const std::string& path_a, const std::string& path_b, const Common& c, bool& equivalent) {
  const LabeledImage a = io::read_image(path_a, c.header).image;
  const LabeledImage b = io::read_image(path_b, c.header).image;
  equivalent = decide(a, b, c);
  const GroupTag gram_group = c.group == GroupTag::Similarity ? GroupTag::Similarity : GroupTag::Motion;
  Json rec{{"command", "compare"},
           {"inputs", Json::array({path_a, path_b})},
           {"group", to_string(c.group)},
           {"tolerances", tolerances(c)},
           {"equivalent", equivalent},
           {"gram_distance", orbit_distance_gram(a, b, gram_group, c.scheme).value},
           {"procrustes_distance", orbit_distance_procrustes(a, b, c.group).value}};
  if (c.group == GroupTag::Similarity) rec["scheme"] = to_string(c.scheme);
  return rec;
}

inline Json cmd_align(const std::string& path_a, const std::string& path_b, const Common& c) {
  const LabeledImage a = io::read_image(path_a, c.header).image;
  const LabeledImage b = io::read_image(path_b, c.header).image;
  const AlignmentResult fit = align(a, b, c.group);
  return Json{{"command", "align"},
              {"inputs", Json::array({path_a, path_b})},
              {"group", to_string(c.group)},
              {"rotation", io::to_json(fit.transform.rotation())},
              {"translation", io::to_json(fit.transform.translation())},
              {"proper", fit.transform.proper()},
              {"scale", fit.scale},
              {"residual", fit.residual}};
}

enum class Metric { Gram, Procrustes };

/// Pairwise distances between every image named in a manifest
/// {"images": [...]}. Relative paths resolve against the manifest's directory.
/// Pairs are evaluated on worker threads and written back by index.
inline Json cmd_dist_matrix(const std::string& manifest_path, const Common& c, Metric metric,
                            unsigned threads = std::thread::hardware_concurrency()) {
  const Json manifest = [&] {
    try {
      return Json::parse(io::read_text(manifest_path));
    } catch (const Json::parse_error& e) {
      throw ParseError(manifest_path + ": invalid JSON: " + e.what());
    }
  }();
  if (!manifest.is_object() || !manifest.contains("images") || !manifest["images"].is_array() ||
      manifest["images"].empty()) {
    throw ParseError(manifest_path + ": manifest must be {\"images\": [path, ...]} with at least one path");
  }
  if (metric == Metric::Gram && c.group == GroupTag::ProperMotion) {
    throw InvalidArgument("the gram metric does not distinguish proper motions; use --metric procrustes");
  }

  const std::filesystem::path base = std::filesystem::path(manifest_path).parent_path();
  std::vector<std::string> paths;
  std::vector<LabeledImage> images;
  for (std::size_t i = 0; i < manifest["images"].size(); ++i) {
    const Json& entry = manifest["images"][i];
    const std::string where = "image " + std::to_string(i);
    if (!entry.is_string()) throw ParseError(manifest_path + ": " + where + " is not a path string");
    std::filesystem::path p = entry.get<std::string>();
    if (p.is_relative()) p = base / p;
    try {
      images.push_back(io::read_image(p, c.header).image);
    } catch (const Error& e) {
      throw ParseError(where + ": " + e.what());
    }
    paths.push_back(p.string());
    if (images.back().n() != images.front().n() ||
        (metric == Metric::Procrustes && images.back().k() != images.front().k())) {
      throw ShapeMismatch(where + " ('" + paths.back() + "') does not match the shape of image 0");
    }
  }

  const std::size_t m = images.size();
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t j = i + 1; j < m; ++j) pairs.emplace_back(i, j);
  }
  std::vector<double> values(pairs.size(), 0.0);
  std::vector<std::exception_ptr> failures(pairs.size());
  auto work = [&](std::size_t begin, std::size_t stride) {
    for (std::size_t p = begin; p < pairs.size(); p += stride) {
      const auto [i, j] = pairs[p];
      try {
        values[p] = metric == Metric::Gram ? orbit_distance_gram(images[i], images[j], c.group, c.scheme).value
                                           : orbit_distance_procrustes(images[i], images[j], c.group).value;
      } catch (...) {
        failures[p] = std::current_exception();
      }
    }
  };
  const std::size_t workers = std::clamp<std::size_t>(threads, 1, std::max<std::size_t>(pairs.size(), 1));
  std::vector<std::thread> pool;
  for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(work, w, workers);
  work(0, workers);
  for (auto& t : pool) t.join();

  for (std::size_t p = 0; p < pairs.size(); ++p) {
    if (!failures[p]) continue;
    try {
      std::rethrow_exception(failures[p]);
    } catch (const DegenerateImage& e) {
      throw DegenerateImage("pair (" + std::to_string(pairs[p].first) + ", " + std::to_string(pairs[p].second) +
                            "): " + e.what());
    }
  }

  Matrix dist = Matrix::Zero(Index(m), Index(m));
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const auto [i, j] = pairs[p];
    dist(Index(i), Index(j)) = values[p];
    dist(Index(j), Index(i)) = values[p];
  }
  Json rec{{"command", "dist-matrix"},
           {"inputs", paths},
           {"group", to_string(c.group)},
           {"metric", metric == Metric::Gram ? "gram" : "procrustes"},
           {"distances", io::to_json(dist)}};
  if (c.group == GroupTag::Similarity && metric == Metric::Gram) rec["scheme"] = to_string(c.scheme);
  return rec;
}

enum class GenTransform { None, Motion, Proper, Similarity };

struct GenOptions {
  Index n = 5;
  Index k = 3;
  std::uint64_t seed = 0;
  GenTransform transform = GenTransform::Motion;
  double noise = 0.0;
  std::string out = "gen";
  io::Format format = io::Format::Json;
};

inline std::string to_string(GenTransform t) {
  switch (t) {
    case GenTransform::None: return "none";
    case GenTransform::Motion: return "motion";
    case GenTransform::Proper: return "proper";
    case GenTransform::Similarity: return "similarity";
  }
  return "?";
}

/// Writes <out>_a (a random image) and, unless the transform is none and
/// there is no noise, <out>_b = scale * g(a) + noise with the ground truth in
/// <out>_transform.json.
inline Json cmd_gen(const GenOptions& o) {
  if (o.n < 1 || o.k < 1) throw InvalidArgument("gen: --n and --k must be at least 1");
  if (!(o.noise >= 0.0)) throw InvalidArgument("gen: --noise must be nonnegative");
  Rng rng(o.seed);
  const LabeledImage a = random_image(o.n, o.k, rng);

  MotionElement g = MotionElement::identity(o.k);
  double scale = 1.0;
  if (o.transform != GenTransform::None) g = random_motion(o.k, rng, 10.0, o.transform == GenTransform::Proper);
  if (o.transform == GenTransform::Similarity) {
    scale = std::exp(std::uniform_real_distribution<double>(std::log(0.1), std::log(10.0))(rng));
  }
  Matrix b = act_on_image(g, scaled(a, scale)).points();
  if (o.noise > 0.0) b += o.noise * gaussian_matrix(o.n, o.k, rng);

  const std::string ext = o.format == io::Format::Csv ? ".csv" : ".json";
  const std::string path_a = o.out + "_a" + ext;
  io::write_image(path_a, {a, std::nullopt});
  Json files{{"image", path_a}};
  if (o.transform != GenTransform::None || o.noise > 0.0) {
    const std::string path_b = o.out + "_b" + ext;
    const std::string path_t = o.out + "_transform.json";
    io::write_image(path_b, {LabeledImage(std::move(b)), std::nullopt});
    io::write_text(path_t, io::dump_string(Json{{"kind", to_string(o.transform)},
                                                {"rotation", io::to_json(g.rotation())},
                                                {"translation", io::to_json(g.translation())},
                                                {"proper", g.proper()},
                                                {"scale", scale},
                                                {"noise", o.noise}}));
    files["transformed"] = path_b;
    files["transform"] = path_t;
  }
  return Json{{"command", "gen"},   {"n", o.n},          {"k", o.k},         {"seed", o.seed},
              {"transform", to_string(o.transform)}, {"noise", o.noise}, {"files", files}};
}

inline Json cmd_selftest(std::int64_t trials, std::uint64_t seed, bool& all_passed) {
  if (trials < 0) throw InvalidArgument("selftest: --trials must be nonnegative");
  Json props = Json::array();
  all_passed = true;
  for (const PropertyReport& r : run_selftest(trials, seed)) {
    props.push_back(Json{{"name", r.name}, {"passed", r.passed}, {"trials", r.trials}});
    all_passed = all_passed && r.ok();
  }
  return Json{{"command", "selftest"}, {"trials", trials}, {"seed", seed}, {"properties", props},
              {"passed", all_passed}};
}

inline Json cmd_convert(const std::string& in, const std::string& out, bool header) {
  const io::ImageData data = io::read_image(in, header);
  io::write_image(out, data);
  return Json{{"command", "convert"}, {"inputs", Json::array({in})}, {"output", out},
              {"n", data.image.n()}, {"k", data.image.k()}};
}

/// Entry point of the `orbitshape` tool. Writes one JSON record to `out` and
/// diagnostics to `err`; returns the process exit code.
inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Invariants, equivalence tests and orbit metrics for labeled point configurations", "orbitshape"};
  app.require_subcommand(1);

  Common common;
  auto add_group = [&](CLI::App* sub) {
    sub->add_option("--group", common.group, "motion | proper | similarity")
        ->transform(CLI::CheckedTransformer(kGroups, CLI::ignore_case));
  };
  auto add_scheme = [&](CLI::App* sub) {
    sub->add_option("--scheme", common.scheme, "similarity normalization: max | mean | gmean")
        ->transform(CLI::CheckedTransformer(kSchemes, CLI::ignore_case));
  };
  auto add_tols = [&](CLI::App* sub) {
    sub->add_option("--tol", common.tol, "relative equivalence tolerance")->check(CLI::NonNegativeNumber);
    sub->add_option("--tol-rank", common.tol_rank, "relative rank cutoff")->check(CLI::NonNegativeNumber);
  };
  auto add_header = [&](CLI::App* sub) { sub->add_flag("--header", common.header, "skip one CSV header line"); };

  std::string file_a, file_b, manifest, convert_out;
  bool full_gram = false;

  auto* invariant = app.add_subcommand("invariant", "centroid, semi-axes, multiplicities and rank of one image");
  invariant->add_option("file", file_a)->required();
  add_header(invariant);
  invariant->add_option("--tol-rank", common.tol_rank, "relative rank cutoff")->check(CLI::NonNegativeNumber);
  invariant->add_option("--tol-group", common.tol_group, "relative multiplicity grouping tolerance")
      ->check(CLI::NonNegativeNumber);
  invariant->add_flag("--full-gram", full_gram, "include the Gram matrix");

  auto* compare = app.add_subcommand("compare", "decide whether two images lie on the same orbit");
  compare->add_option("file_a", file_a)->required();
  compare->add_option("file_b", file_b)->required();
  add_group(compare);
  add_scheme(compare);
  add_tols(compare);
  add_header(compare);

  auto* align_cmd = app.add_subcommand("align", "best transform carrying the first image onto the second");
  align_cmd->add_option("file_a", file_a)->required();
  align_cmd->add_option("file_b", file_b)->required();
  add_group(align_cmd);
  add_header(align_cmd);

  Metric metric = Metric::Gram;
  auto* dist = app.add_subcommand("dist-matrix", "pairwise orbit distances for the images in a manifest");
  dist->add_option("manifest", manifest)->required();
  add_group(dist);
  add_scheme(dist);
  add_header(dist);
  dist->add_option("--metric", metric, "gram | procrustes")
      ->transform(CLI::CheckedTransformer(std::map<std::string, Metric>{{"gram", Metric::Gram},
                                                                        {"procrustes", Metric::Procrustes}},
                                          CLI::ignore_case));

  GenOptions gen_opts;
  std::string gen_format = "json";
  auto* gen = app.add_subcommand("gen", "write a random image and a transformed copy");
  gen->add_option("--n", gen_opts.n, "point count")->check(CLI::PositiveNumber);
  gen->add_option("--k", gen_opts.k, "ambient dimension")->check(CLI::PositiveNumber);
  gen->add_option("--seed", gen_opts.seed, "random seed");
  gen->add_option("--transform", gen_opts.transform, "none | motion | proper | similarity")
      ->transform(CLI::CheckedTransformer(std::map<std::string, GenTransform>{{"none", GenTransform::None},
                                                                              {"motion", GenTransform::Motion},
                                                                              {"proper", GenTransform::Proper},
                                                                              {"similarity", GenTransform::Similarity}},
                                          CLI::ignore_case));
  gen->add_option("--noise", gen_opts.noise, "standard deviation of Gaussian noise added to the copy")
      ->check(CLI::NonNegativeNumber);
  gen->add_option("--out", gen_opts.out, "output path prefix");
  gen->add_option("--format", gen_format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  std::int64_t trials = 100;
  std::uint64_t seed = 0;
  auto* selftest = app.add_subcommand("selftest", "randomized property sweeps");
  selftest->add_option("--trials", trials, "trials per property")->check(CLI::NonNegativeNumber);
  selftest->add_option("--seed", seed, "random seed");

  auto* convert = app.add_subcommand("convert", "rewrite an image file as CSV or JSON (by extension)");
  convert->add_option("input", file_a)->required();
  convert->add_option("output", convert_out)->required();
  add_header(convert);

  std::vector<const char*> argv;
  argv.push_back("orbitshape");
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitSuccess : kExitError;
  }

  try {
    Json record;
    int code = kExitSuccess;
    if (*invariant) {
      record = cmd_invariant(file_a, common, full_gram);
    } else if (*compare) {
      bool equivalent = false;
      record = cmd_compare(file_a, file_b, common, equivalent);
      code = equivalent ? kExitSuccess : kExitNegative;
    } else if (*align_cmd) {
      record = cmd_align(file_a, file_b, common);
    } else if (*dist) {
      record = cmd_dist_matrix(manifest, common, metric);
    } else if (*gen) {
      gen_opts.format = gen_format == "csv" ? io::Format::Csv : io::Format::Json;
      record = cmd_gen(gen_opts);
    } else if (*selftest) {
      bool passed = true;
      record = cmd_selftest(trials, seed, passed);
      for (const auto& p : record["properties"]) {
        err << p["name"].get<std::string>() << ": " << p["passed"].get<std::int64_t>() << "/"
            << p["trials"].get<std::int64_t>() << '\n';
      }
      code = passed ? kExitSuccess : kExitNegative;
    } else if (*convert) {
      record = cmd_convert(file_a, convert_out, common.header);
    }
    out << io::dump_string(record);
    return code;
  } catch (const std::exception& e) {
    err << "error (" << error_kind(e) << "): " << e.what() << '\n';
    return kExitError;
  }
}

}  // namespace orbitshape::cli
