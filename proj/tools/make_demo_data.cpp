// Writes the demo embedding and topic files: make_demo_data <output_dir>
#include <filesystem>
#include <iostream>

#include "tbw/error.hpp"
#include "tbw/synthetic.hpp"

namespace {

tbw::SyntheticSpec demo_spec() {
  tbw::SyntheticSpec spec;
  spec.dim = 32;
  spec.seed = 20240917;
  spec.topic_names = {"theory", "applications", "models", "optimization"};
  spec.topic_words = {
      {"theorem", "proof", "lemma", "bound", "bounds", "convergence", "complexity", "guarantee",
       "guarantees", "analysis", "asymptotic", "corollary", "regret", "sample", "generalization",
       "theoretical", "rigorous", "assumption", "assumptions", "minimax", "consistency",
       "estimator", "statistical", "information", "lower", "upper", "tight", "provable", "formal",
       "derivation"},
      {"application", "applications", "dataset", "datasets", "benchmark", "benchmarks",
       "deployment", "medical", "vision", "speech", "translation", "robotics", "recommendation",
       "practical", "realworld", "users", "industry", "clinical", "images", "video", "language",
       "retrieval", "detection", "segmentation", "healthcare", "domain", "tasks", "system",
       "pipeline", "production"},
      {"model", "models", "architecture", "transformer", "transformers", "network", "networks",
       "neural", "layer", "layers", "attention", "encoder", "decoder", "embedding", "embeddings",
       "parameters", "pretrained", "finetuning", "representation", "representations",
       "generative", "diffusion", "autoregressive", "latent", "capacity", "scaling", "depth",
       "width", "module", "backbone"},
      {"optimization", "optimizer", "gradient", "gradients", "descent", "stochastic", "sgd",
       "adam", "learning", "rate", "momentum", "loss", "objective", "minimize", "convex",
       "nonconvex", "regularization", "hyperparameter", "hyperparameters", "training",
       "iterations", "steps", "batch", "schedule", "tuning", "constraint", "constraints",
       "solver", "saddle", "curvature"},
  };
  spec.filler_groups = {
      {"the", "a", "an"},
      {"this", "that", "these"},
      {"paper", "work", "manuscript", "submission"},
      {"is", "are", "was"},
      {"and", "also", "plus"},
      {"of", "for", "to"},
      {"in", "on", "with"},
      {"clear", "clearly", "lucid"},
      {"good", "strong", "solid"},
      {"weak", "limited", "insufficient"},
      {"novel", "new", "original"},
      {"authors", "they", "researchers"},
      {"propose", "present", "introduce"},
      {"method", "approach", "technique"},
      {"results", "findings", "outcomes"},
      {"experiments", "evaluation", "empirical"},
      {"show", "demonstrate", "indicate"},
      {"however", "but", "although"},
      {"could", "should", "might"},
      {"more", "additional", "further"},
      {"improve", "enhance", "strengthen"},
      {"writing", "presentation", "exposition"},
      {"contribution", "contributions", "significance"},
      {"related", "prior", "previous"},
      {"compare", "comparison", "baseline"},
      {"interesting", "compelling", "promising"},
      {"unclear", "confusing", "ambiguous"},
      {"discussion", "explanation", "justification"},
      {"section", "appendix", "figure"},
      {"overall", "generally", "broadly"},
      {"recommend", "suggest", "advise"},
      {"accept", "acceptance", "publish"},
      {"reject", "rejection", "decline"},
      {"minor", "small", "slight"},
      {"major", "significant", "substantial"},
      {"well", "properly", "carefully"},
      {"not", "no", "lack"},
      {"it", "its", "which"},
      {"we", "our", "reviewer"},
      {"missing", "absent", "omitted"},
      {"questions", "concerns", "issues"},
      {"use", "uses", "using"},
      {"performance", "accuracy", "effectiveness"},
      {"simple", "straightforward", "easy"},
      {"limitations", "weaknesses", "drawbacks"},
      {"strengths", "advantages", "merits"},
  };
  return spec;
}

}  // namespace

int main(int argc, char** argv) {
  if (argc != 2) {
    std::cerr << "usage: make_demo_data <output_dir>\n";
    return 2;
  }
  try {
    const std::filesystem::path dir = argv[1];
    std::filesystem::create_directories(dir);
    const auto vocab = tbw::make_synthetic_vocabulary(demo_spec());
    tbw::save_embeddings(vocab.table, dir / "embeddings.txt");
    tbw::save_embeddings(vocab.topics.table(), dir / "topics.txt");
    std::cout << "wrote " << vocab.table.size() << " tokens, " << vocab.topics.size()
              << " topics to " << dir.string() << '\n';
  } catch (const tbw::Error& e) {
    std::cerr << e.what() << '\n';
    return 3;
  }
  return 0;
}
