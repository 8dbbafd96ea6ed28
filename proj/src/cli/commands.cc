// Copyright 2026 The wavc Authors. All Rights Reserved.
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

#include "wavc/cli/commands.h"

#include <fstream>
#include <map>

#include "wavc/acoustic/f0.h"
#include "wavc/acoustic/loudness.h"
#include "wavc/acoustic/mcep.h"
#include "wavc/acoustic/vocoder.h"
#include "wavc/common/error.h"
#include "wavc/common/log.h"
#include "wavc/eval/evaluation.h"
#include "wavc/io/tensor_container.h"
#include "wavc/io/wav_io.h"

namespace wavc::cli {

namespace fs = std::filesystem;
namespace F = torch::nn::functional;
using nlohmann::json;

namespace {

data::Manifest LoadManifestFrom(const RunConfig &c) {
  if (c.paths.manifest.empty()) throw ConfigError("paths.manifest is required");
  return data::Manifest::Load(c.paths.manifest);
}

data::CacheOptions CacheOptionsFor(const RunConfig &c) {
  data::CacheOptions o;
  o.cache_root = c.CacheRoot();
  o.frame_period_ms = c.features.frame_period_ms;
  o.mcep_order = c.features.mcep_order;
  o.world = c.features.World();
  o.workers = c.features.workers;
  return o;
}

fs::path SaveManifest(const RunConfig &c, const data::Manifest &m) {
  fs::create_directories(c.paths.out_dir);
  const auto path = fs::path(c.paths.out_dir) / "manifest.jsonl";
  m.Save(path);
  return path;
}

FeatureSet LoadRecordFeatures(const data::UtteranceRecord &r) {
  if (r.feature_path.empty()) throw InvalidArgument("utterance " + r.utt_id + " has no cached features");
  return LoadFeatures(r.feature_path);
}

const data::UtteranceRecord &LongestTraining(const data::Manifest &m, const std::string &speaker) {
  const data::UtteranceRecord *best = nullptr;
  for (const auto &r : m.records)
    if (r.speaker == speaker && r.split == data::Split::kTrain && (!best || r.n_frames > best->n_frames)) best = &r;
  if (!best) throw InvalidArgument("speaker '" + speaker + "' has no training utterance to use as reference");
  return *best;
}

std::int64_t IndexOf(const std::vector<std::string> &speakers, const std::string &label) {
  for (std::size_t i = 0; i < speakers.size(); ++i)
    if (speakers[i] == label) return static_cast<std::int64_t>(i);
  throw InvalidArgument("unknown speaker '" + label + "'");
}

std::string SafeName(std::string s) {
  for (auto &ch : s)
    if (ch == '/' || ch == '\\') ch = '_';
  return s;
}

}  // namespace

std::vector<std::string> KeysReadBy(const std::string &command) {
  if (command == "extract") return {"paths.audio_root", "paths.cache_root", "paths.out_dir", "features."};
  if (command == "subset") return {"paths.manifest", "paths.out_dir", "subset."};
  if (command == "train") return {"paths.manifest", "paths.out_dir", "paths.resume_from", "model.", "training."};
  if (command == "convert") return {"paths.manifest", "paths.checkpoint", "paths.out_dir", "convert."};
  if (command == "evaluate")
    return {"paths.manifest", "paths.conversions", "paths.out_dir", "features.", "evaluate."};
  throw InvalidArgument("unknown command '" + command + "'");
}

fs::path CmdExtract(const RunConfig &c) {
  if (c.paths.audio_root.empty()) throw ConfigError("paths.audio_root is required");
  auto m = data::BuildManifest(c.paths.audio_root, c.features.holdout_fraction, c.features.World().supported_rates);
  data::CacheStats stats;
  m = data::CacheFeatures(m, CacheOptionsFor(c), &stats);
  WAVC_INFO << "features: " << stats.analyzed << " analyzed, " << stats.reused << " reused, "
            << stats.failed.size() << " failed";
  return SaveManifest(c, m);
}

fs::path CmdSubset(const RunConfig &c) {
  auto m = LoadManifestFrom(c);
  const auto n = c.subset.n_speakers > 0 ? c.subset.n_speakers : static_cast<std::int64_t>(m.speakers.size());
  auto sub = data::SubsetLowResource(m, n, c.subset.m_samples, c.subset.seed);
  WAVC_INFO << "subset: " << sub.speakers.size() << " speakers, " << sub.records.size() << " utterances";
  return SaveManifest(c, sub);
}

fs::path CmdTrain(const RunConfig &c) {
  auto m = LoadManifestFrom(c);
  auto bank = train::FeatureBank::FromManifest(m);
  auto mc = c.model;
  mc.Harmonize(bank.mcep_dim(), static_cast<std::int64_t>(m.speakers.size()));
  mc.Validate();
  train::TrainOptions options;
  options.out_dir = c.paths.out_dir;
  options.resume_from = c.paths.resume_from;
  const auto every = std::max<std::int64_t>(1, c.training.total_iterations / 100);
  options.on_report = [every](const train::LossReport &r) {
    if (r.iteration % every == 0)
      WAVC_INFO << "iter " << r.iteration << " g " << r.weighted_total_g << " d " << r.weighted_total_d
                << " cyc " << r.components.cyc << " spk_rec " << r.components.spk_rec;
  };
  return train::Train(bank, mc, c.training, m.speakers, m.f0_stats, options);
}

torch::Tensor McepTensor(const FeatureSet &f) {
  const auto t = static_cast<std::int64_t>(f.mcep.coeffs.rows());
  const auto d = static_cast<std::int64_t>(f.mcep.coeffs.cols());
  return torch::from_blob(const_cast<double *>(f.mcep.coeffs.data()), {t, d}, torch::kDouble)
      .t()
      .to(torch::kFloat)
      .contiguous();
}

Matrix<double> ConvertMcep(train::TrainingState &state, const ConversionRequest &req) {
  if (!req.source) throw InvalidArgument("conversion request without source features");
  const auto target = IndexOf(state.speakers, req.target_speaker);
  auto x = McepTensor(*req.source);
  const auto d = x.size(0), frames = x.size(1);
  if (d != state.model_config.generator.mcep_dim)
    throw ShapeError("source has " + std::to_string(d) + " coefficients, model expects " +
                     std::to_string(state.model_config.generator.mcep_dim));
  if (frames == 0) throw InvalidArgument("source utterance has no frames");
  if (req.reference.dim() != 2 || req.reference.size(0) != d || req.reference.size(1) == 0)
    throw ShapeError("reference features must be [" + std::to_string(d) + ", T > 0]");

  torch::NoGradGuard no_grad;
  state.models.Train(false);
  const auto p = state.model_config.generator.time_multiple();
  const auto padded = (frames + p - 1) / p * p;
  const auto left = (padded - frames) / 2, right = padded - frames - left;
  auto xn = state.normalizer.Normalize(x).unsqueeze(0);  // [1, D, T]
  if (padded != frames) xn = F::pad(xn, F::PadFuncOptions({left, right}).mode(torch::kReplicate));
  auto ref = state.normalizer.Normalize(req.reference.to(torch::kFloat)).unsqueeze(0).unsqueeze(0);
  auto e = state.models.e(ref, torch::tensor({target}, torch::kLong));
  auto y = state.models.g(xn.unsqueeze(1), e).squeeze(0).squeeze(0).narrow(1, left, frames);
  y = state.normalizer.Denormalize(y).t().to(torch::kDouble).contiguous();  // [T, D]

  Matrix<double> out(static_cast<std::size_t>(frames), static_cast<std::size_t>(d),
                     std::vector<double>(y.data_ptr<double>(), y.data_ptr<double>() + y.numel()));
  if (req.restore_c0)
    for (std::size_t t = 0; t < out.rows(); ++t) out(t, 0) = req.source->mcep.coeffs(t, 0);
  return out;
}

Waveform ConvertUtterance(train::TrainingState &state, const ConversionRequest &req) {
  McepSegment converted{ConvertMcep(state, req)};
  const FeatureSet &src = *req.source;

  std::vector<double> f0 = src.f0;
  auto s = state.f0_stats.find(req.source_speaker);
  auto t = state.f0_stats.find(req.target_speaker);
  if (s != state.f0_stats.end() && t != state.f0_stats.end() && s->second.defined() && t->second.defined())
    f0 = TransformLogF0(src.f0, s->second, t->second);
  else
    WAVC_WARN << "no log-F0 statistics for " << req.source_speaker << " -> " << req.target_speaker
              << "; F0 left unchanged";

  VocoderAnalysis a;
  a.f0 = std::move(f0);
  a.spectral_envelope = McepToEnvelope(converted, static_cast<int>(src.aperiodicity.cols()), src.alpha);
  a.aperiodicity = src.aperiodicity;
  a.frame_period_ms = src.frame_period_ms;
  a.sample_rate = src.sample_rate;
  auto wave = Synthesize(WorldVocoder(), a);
  return NormalizeLoudness(wave, req.loudness_lufs).wave;
}

void SaveConversions(const fs::path &path, const std::vector<ConversionRecord> &records) {
  std::string text;
  for (const auto &r : records)
    text += json{{"id", r.id},
                 {"source_utt", r.source_utt},
                 {"source_speaker", r.source_speaker},
                 {"target_speaker", r.target_speaker},
                 {"wav", r.wav_path}}
                .dump() +
            "\n";
  AtomicWriteFile(path, std::as_bytes(std::span(text.data(), text.size())));
}

std::vector<ConversionRecord> LoadConversions(const fs::path &path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path.string());
  std::vector<ConversionRecord> out;
  std::string line;
  int n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (line.empty()) continue;
    try {
      auto j = json::parse(line);
      out.push_back({j.at("id"), j.at("source_utt"), j.at("source_speaker"), j.at("target_speaker"), j.at("wav")});
    } catch (const json::exception &e) {
      throw IoError(path.string() + ":" + std::to_string(n) + ": " + e.what());
    }
  }
  return out;
}

fs::path CmdConvert(const RunConfig &c) {
  if (c.paths.checkpoint.empty()) throw ConfigError("paths.checkpoint is required");
  auto m = LoadManifestFrom(c);
  auto state = train::LoadCheckpoint(c.paths.checkpoint);

  std::vector<std::string> sources = c.convert.sources;
  if (sources.empty())
    for (const auto &r : m.Records(data::Split::kHoldout)) sources.push_back(r.utt_id);
  if (sources.empty()) throw InvalidArgument("no source utterances to convert");
  std::vector<std::string> targets = c.convert.targets.empty() ? state.speakers : c.convert.targets;
  for (const auto &t : targets) IndexOf(state.speakers, t);

  const auto out_dir = fs::path(c.paths.out_dir);
  fs::create_directories(out_dir / "converted");
  std::map<std::string, torch::Tensor> references;
  for (const auto &t : targets) {
    const auto &ref = c.convert.reference.empty() ? LongestTraining(m, t) : m.Find(c.convert.reference);
    references[t] = McepTensor(LoadRecordFeatures(ref));
  }

  std::vector<ConversionRecord> records;
  for (const auto &utt : sources) {
    const auto &r = m.Find(utt);
    auto features = LoadRecordFeatures(r);
    for (const auto &t : targets) {
      ConversionRequest req{&features, r.speaker, t, references.at(t), c.convert.loudness_lufs,
                            c.convert.restore_c0};
      auto wave = ConvertUtterance(state, req);
      const auto id = r.utt_id + "->" + t;
      const auto path = out_dir / "converted" / (SafeName(r.utt_id) + "__to__" + t + ".wav");
      WriteWav(path, wave);
      records.push_back({id, r.utt_id, r.speaker, t, path.string()});
    }
  }
  const auto list = out_dir / "conversions.jsonl";
  SaveConversions(list, records);
  WAVC_INFO << "converted " << records.size() << " utterances into " << (out_dir / "converted").string();
  return list;
}

fs::path CmdEvaluate(const RunConfig &c) {
  if (c.paths.conversions.empty()) throw ConfigError("paths.conversions is required");
  auto m = LoadManifestFrom(c);
  auto conversions = LoadConversions(c.paths.conversions);
  if (conversions.empty()) throw InvalidArgument("no converted utterances to evaluate");

  std::vector<eval::LabeledFeatures> real, enrollment;
  for (const auto &r : m.records) {
    eval::LabeledFeatures f{r.utt_id, r.speaker_index, McepTensor(LoadRecordFeatures(r))};
    if (r.split == data::Split::kTrain) real.push_back(f);
    enrollment.push_back(std::move(f));
  }
  auto classifier = eval::TrainSpeakerClassifier(real, c.evaluate.classifier);

  WorldVocoder vocoder(c.features.World());
  std::vector<eval::LabeledFeatures> converted;
  for (const auto &conv : conversions) {
    auto analysis = Analyze(vocoder, ReadWav(conv.wav_path), c.features.frame_period_ms, conv.id);
    FeatureSet f;
    f.mcep = EnvelopeToMcep(analysis, c.features.mcep_order);
    converted.push_back({conv.id, m.SpeakerIndex(conv.target_speaker), McepTensor(f)});
  }
  auto report = eval::Evaluate(classifier, converted, enrollment, m.speakers, c.evaluate.condition);

  const auto out_dir = fs::path(c.paths.out_dir);
  fs::create_directories(out_dir);
  const auto path = out_dir / "eval_report.json";
  const auto text = report.ToJson().dump(2) + "\n";
  AtomicWriteFile(path, std::as_bytes(std::span(text.data(), text.size())));
  const auto table = report.Table();
  AtomicWriteFile(out_dir / "eval_report.txt", std::as_bytes(std::span(table.data(), table.size())));
  WAVC_INFO << "\n" << table;
  return path;
}

}  // namespace wavc::cli
