#include "tbw/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <iomanip>
#include <sstream>
#include <thread>

#include "tbw/error.hpp"
#include "tbw/generate.hpp"
#include "tbw/random.hpp"
#include "tbw/text_io.hpp"

namespace tbw {

namespace {

// Stream ids for derive_seed; cells use their own index, which stays below these.
constexpr std::uint64_t kPositiveStream = 1u << 20;
constexpr std::uint64_t kNegativeStream = 2u << 20;

std::string rate_label(double rate) { return format_fixed(rate, 2); }

std::string cell_label(const CellResult& cell) {
  return std::string(to_string(cell.scheme)) + "_" + cell.attack.name;
}

Scheme scheme_for(DetectionScheme scheme, const ExperimentInputs& in,
                  const ExperimentSettings& s) {
  if (scheme == DetectionScheme::kgw) return KgwScheme{s.kgw};
  return TbwScheme{in.partition, in.topics, in.table, s.watermark, s.top_k};
}

DetectionReport detect(DetectionScheme scheme, const std::string& text, const PromptPair& prompt,
                       const ExperimentInputs& in, const ExperimentSettings& s,
                       std::string text_id) {
  if (scheme == DetectionScheme::kgw) {
    return detect_kgw(text, s.kgw, in.lm->vocab(), s.watermark.min_tokens, std::move(text_id));
  }
  return detect_tbw(text, std::string_view(prompt.submission), *in.partition, *in.topics,
                    *in.table, s.watermark, s.top_k, std::move(text_id));
}

double mean(const std::vector<double>& xs) {
  if (xs.empty()) return 0.0;
  double sum = 0.0;
  for (double x : xs) sum += x;
  return sum / static_cast<double>(xs.size());
}

CellResult run_cell(const ExperimentInputs& in, const ExperimentSettings& s,
                    std::size_t cell_index, DetectionScheme scheme, const NamedAttack& attack) {
  CellResult cell;
  cell.cell_index = cell_index;
  cell.scheme = scheme;
  cell.attack = attack;
  cell.negative_pool = s.negative_pool;
  const std::string prefix = std::string(to_string(scheme)) + "/" + attack.name + "/";

  try {
    if (in.prompts.empty()) {
      throw Error(ErrorCode::invalid_argument, "experiment needs at least one prompt");
    }
    const Scheme gen_scheme = scheme_for(scheme, in, s);
    const auto scheme_stream =
        derive_seed(s.master_seed, kPositiveStream + static_cast<std::uint64_t>(scheme));

    // Positives: watermarked generations, then the cell's attack.
    std::vector<TokenSequence> positives;
    positives.reserve(s.sample_count);
    for (std::size_t i = 0; i < s.sample_count; ++i) {
      const auto& prompt = in.prompts[i % in.prompts.size()];
      GenerationOptions opts{s.sample_length, derive_seed(scheme_stream, i), s.temperature};
      positives.push_back(generate(*in.lm, prompt.prompt, gen_scheme, opts).sequence);
    }
    AttackConfig attack_cfg = attack.config;
    attack_cfg.rng_seed = derive_seed(s.master_seed, cell_index);
    const auto attacked =
        attack_sweep(positives, std::span<const AttackConfig>(&attack_cfg, 1), *in.table);

    // Negatives: unwatermarked generations or human-written reviews.
    std::vector<std::string> negative_texts;
    if (s.negative_pool == NegativePool::generated) {
      const auto neg_stream = derive_seed(s.master_seed, kNegativeStream);
      for (std::size_t i = 0; i < s.sample_count; ++i) {
        const auto& prompt = in.prompts[i % in.prompts.size()];
        GenerationOptions opts{s.sample_length, derive_seed(neg_stream, i), s.temperature};
        negative_texts.push_back(
            detokenize(generate(*in.lm, prompt.prompt, NoWatermark{}, opts).sequence.tokens));
      }
    } else {
      const std::size_t n = std::min(s.sample_count, in.human_texts.size());
      negative_texts.assign(in.human_texts.begin(), in.human_texts.begin() + n);
    }

    std::vector<double> pos_z;
    std::vector<double> neg_z;
    const auto score = [&](const std::string& text, std::size_t i, const std::string& id,
                           std::vector<DetectionReport>& reports, std::vector<double>& zs) {
      try {
        auto report = detect(scheme, text, in.prompts[i % in.prompts.size()], in, s, id);
        zs.push_back(report.z);
        reports.push_back(std::move(report));
      } catch (const Error& e) {
        cell.failures.push_back({id, e.what()});
      }
    };
    for (std::size_t i = 0; i < attacked[0].size(); ++i) {
      score(detokenize(attacked[0][i].tokens), i, prefix + "pos/" + std::to_string(i),
            cell.positives, pos_z);
    }
    for (std::size_t i = 0; i < negative_texts.size(); ++i) {
      score(negative_texts[i], i, prefix + "neg/" + std::to_string(i), cell.negatives, neg_z);
    }
    if (pos_z.empty() || neg_z.empty()) {
      throw Error(ErrorCode::runtime, "no scorable positives or negatives in cell");
    }

    const double threshold =
        scheme == DetectionScheme::kgw ? s.kgw.z_threshold : s.watermark.z_threshold;
    cell.metrics = summarize(pos_z, neg_z, threshold);
    cell.curve = roc(pos_z, neg_z);
    cell.mean_pos_z = mean(pos_z);
    cell.ok = true;
  } catch (const std::exception& e) {
    cell.ok = false;
    cell.error = e.what();
  }
  return cell;
}

}  // namespace

std::string attack_name(double lexical_rate, double order_rate) {
  if (lexical_rate == 0.0 && order_rate == 0.0) return "none";
  return "lex" + rate_label(lexical_rate) + "_ord" + rate_label(order_rate);
}

std::vector<NamedAttack> attack_grid(const std::vector<double>& lexical_rates,
                                     const std::vector<double>& order_rates,
                                     double neighbor_floor) {
  std::vector<NamedAttack> grid;
  for (double lex : lexical_rates) {
    for (double ord : order_rates) {
      AttackConfig cfg{lex, ord, neighbor_floor, 0};
      cfg.validate();
      grid.push_back({attack_name(lex, ord), cfg});
    }
  }
  return grid;
}

ExperimentResult run_experiment(const ExperimentInputs& inputs,
                                const ExperimentSettings& settings) {
  if (!inputs.table || !inputs.topics || !inputs.partition || !inputs.lm) {
    throw Error(ErrorCode::invalid_argument, "experiment inputs are incomplete");
  }
  settings.watermark.validate();
  settings.kgw.validate();
  if (settings.sample_count == 0 || settings.sample_length == 0) {
    throw Error(ErrorCode::invalid_argument, "sample_count and sample_length must be positive");
  }

  struct CellSpec {
    DetectionScheme scheme;
    const NamedAttack* attack;
  };
  std::vector<CellSpec> specs;
  for (auto scheme : settings.schemes) {
    for (const auto& attack : settings.attacks) specs.push_back({scheme, &attack});
  }

  ExperimentResult result;
  result.cells.resize(specs.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < specs.size(); i = next++) {
      result.cells[i] = run_cell(inputs, settings, i, specs[i].scheme, *specs[i].attack);
    }
  };
  const std::size_t jobs = std::clamp<std::size_t>(settings.jobs, 1, std::max<std::size_t>(1, specs.size()));
  if (jobs == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t j = 0; j < jobs; ++j) pool.emplace_back(worker);
  }
  return result;
}

std::string_view to_string(NegativePool pool) {
  return pool == NegativePool::generated ? "generated" : "corpus";
}

std::string format_metrics_table(const ExperimentResult& result) {
  std::ostringstream out;
  out << std::left << std::setw(8) << "scheme" << std::setw(20) << "attack" << std::setw(11)
      << "neg_pool" << std::right << std::setw(7) << "n_pos" << std::setw(7) << "n_neg"
      << std::setw(9) << "auc" << std::setw(9) << "best_f1" << std::setw(9) << "tpr@1%"
      << std::setw(9) << "tpr@10%" << std::setw(9) << "acc@thr" << std::setw(9) << "fpr@thr"
      << std::setw(9) << "mean_z" << "  status\n";
  for (const auto& c : result.cells) {
    out << std::left << std::setw(8) << to_string(c.scheme) << std::setw(20) << c.attack.name
        << std::setw(11) << to_string(c.negative_pool) << std::right;
    if (c.ok) {
      const auto& m = c.metrics;
      out << std::setw(7) << m.n_pos << std::setw(7) << m.n_neg;
      for (double v : {m.auc, m.best_f1, m.tpr_at_1pct, m.tpr_at_10pct, m.accuracy_at_threshold,
                       m.fpr_at_threshold}) {
        out << std::setw(9) << format_fixed(v, 4);
      }
      out << std::setw(9) << format_fixed(c.mean_pos_z, 3) << "  ok\n";
    } else {
      out << std::setw(7) << "-" << std::setw(7) << "-";
      for (int i = 0; i < 7; ++i) out << std::setw(9) << "-";
      out << "  failed: " << c.error << "\n";
    }
  }
  return out.str();
}

nlohmann::json cell_to_json(const CellResult& c) {
  nlohmann::json j;
  j["cell_index"] = c.cell_index;
  j["scheme"] = std::string(to_string(c.scheme));
  j["attack"] = c.attack.name;
  j["lexical_rate"] = c.attack.config.lexical_rate;
  j["order_rate"] = c.attack.config.order_rate;
  j["neighbor_floor"] = c.attack.config.neighbor_floor;
  j["negative_pool"] = std::string(to_string(c.negative_pool));
  j["status"] = c.ok ? "ok" : "failed";
  if (!c.ok) j["error"] = c.error;
  if (c.ok) {
    const auto& m = c.metrics;
    j["auc"] = m.auc;
    j["best_f1"] = m.best_f1;
    j["tpr_at_1pct"] = m.tpr_at_1pct;
    j["tpr_at_10pct"] = m.tpr_at_10pct;
    j["accuracy_at_threshold"] = m.accuracy_at_threshold;
    j["fpr_at_threshold"] = m.fpr_at_threshold;
    j["n_pos"] = m.n_pos;
    j["n_neg"] = m.n_neg;
    j["mean_pos_z"] = c.mean_pos_z;
  }
  j["failed_samples"] = c.failures.size();
  return j;
}

std::string format_roc(const RocCurve& curve) {
  std::string out = "fpr\ttpr\n";
  for (const auto& p : curve.points) {
    out += format_double(p.fpr) + "\t" + format_double(p.tpr) + "\n";
  }
  return out;
}

void write_experiment_outputs(const ExperimentResult& result,
                              const std::filesystem::path& output_dir) {
  const auto metrics_dir = output_dir / "metrics";
  const auto reports_dir = output_dir / "reports";
  write_file(metrics_dir / "metrics.txt", format_metrics_table(result));
  std::string jsonl;
  for (const auto& c : result.cells) jsonl += cell_to_json(c).dump() + "\n";
  write_file(metrics_dir / "metrics.jsonl", jsonl);
  for (const auto& c : result.cells) {
    const std::string label = cell_label(c);
    if (c.ok) write_file(metrics_dir / ("roc_" + label + ".tsv"), format_roc(c.curve));
    std::string lines;
    for (const auto& r : c.positives) lines += serialize_report(r) + "\n";
    for (const auto& r : c.negatives) lines += serialize_report(r) + "\n";
    for (const auto& f : c.failures) {
      lines += nlohmann::json{{"text_id", f.text_id}, {"error", f.error}}.dump() + "\n";
    }
    write_file(reports_dir / (label + ".jsonl"), lines);
  }
}

}  // namespace tbw
