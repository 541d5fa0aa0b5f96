// SPDX-License-Identifier: Apache-2.0
// xlt: corpus augmentation, training, evaluation and diagnostics.
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "xlt/augment/corpus.hpp"
#include "xlt/augment/synthetic.hpp"
#include "xlt/augment/translator.hpp"
#include "xlt/encoder/checkpoint.hpp"
#include "xlt/error.hpp"
#include "xlt/eval/analysis.hpp"
#include "xlt/num/gradcheck_suite.hpp"
#include "xlt/trainer/config.hpp"
#include "xlt/trainer/trainer.hpp"
#include "xlt/translit/table.hpp"

namespace fs = std::filesystem;
using namespace xlt;

namespace {

void write_text(const fs::path& path, const std::string& text) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw LoadError("cannot write " + path.string());
  out << text;
}

/// Writes to `path`, or stdout when empty.
void emit(const std::string& path, const std::string& text) {
  if (path.empty()) {
    std::cout << text;
  } else {
    write_text(path, text);
  }
}

std::string read_input(const std::string& path) {
  if (path.empty() || path == "-") {
    return {std::istreambuf_iterator<char>(std::cin), {}};
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open " + path);
  return {std::istreambuf_iterator<char>(in), {}};
}

translit::MappingTable load_table(const std::string& path, const std::string& schwa) {
  auto table = translit::MappingTable::load_file(path);
  if (!schwa.empty()) table.set_schwa_policy(translit::parse_schwa_policy(schwa));
  return table;
}

struct TrainFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::string mode;
  std::optional<double> alpha;
  std::optional<std::size_t> freeze_depth;
  std::optional<std::size_t> epochs;
};

void add_train_flags(CLI::App* cmd, TrainFlags& f) {
  cmd->add_option("--config", f.config, "Training config (key = value)");
  cmd->add_option("--seed", f.seed, "Seed; init uses seed, shuffling seed+1");
  cmd->add_option("--mode", f.mode, "en | tr | tl | en+tr+tl | joint | joint_ts");
  cmd->add_option("--alpha", f.alpha, "Weight of the alignment loss");
  cmd->add_option("--freeze-depth", f.freeze_depth, "Number of frozen lower layers");
  cmd->add_option("--epochs", f.epochs, "Maximum epochs");
}

train::TrainConfig resolve_config(const TrainFlags& f) {
  train::TrainConfig cfg = f.config.empty() ? train::TrainConfig{} : train::load_config(f.config);
  if (f.seed) cfg.seed = *f.seed;
  if (!f.mode.empty()) cfg.mode = train::parse_mode(f.mode);
  if (f.alpha) cfg.weights.alpha = *f.alpha;
  if (f.freeze_depth) cfg.freeze_depth = *f.freeze_depth;
  if (f.epochs) cfg.max_epochs = *f.epochs;
  cfg.validate();
  std::cerr << "# resolved config\n" << train::format_config(cfg);
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Teacher-student alignment for transliterated text classification"};
  app.require_subcommand(1);

  // synth
  augment::SyntheticConfig synth_cfg;
  std::string synth_out;
  auto* synth = app.add_subcommand("synth", "Generate the synthetic parallel task");
  synth->add_option("--seed", synth_cfg.seed, "Generator seed");
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--train", synth_cfg.n_train, "Training sentences");
  synth->add_option("--val", synth_cfg.n_val, "Validation sentences");
  synth->add_option("--test", synth_cfg.n_test, "Test sentences");
  synth->add_option("--label-noise", synth_cfg.label_noise, "Train/val label flip rate");

  // augment
  std::string aug_in, aug_out, aug_table, aug_lexicon, aug_schwa;
  auto* aug = app.add_subcommand("augment", "Corpus JSONL -> (src, tr, tl) triplet JSONL");
  aug->add_option("--in", aug_in, "Labeled corpus JSONL")->required();
  aug->add_option("--out", aug_out, "Triplet JSONL")->required();
  aug->add_option("--table", aug_table, "Transliteration table TSV")->required();
  aug->add_option("--lexicon", aug_lexicon, "Translation lexicon TSV (identity if absent)");
  aug->add_option("--schwa", aug_schwa, "Override the table's schwa policy");

  // translit
  std::string tl_in, tl_out, tl_table, tl_schwa;
  auto* tl = app.add_subcommand("translit", "Transliterate text line by line");
  tl->add_option("--table", tl_table, "Transliteration table TSV")->required();
  tl->add_option("--in", tl_in, "Input text (stdin if absent)");
  tl->add_option("--out", tl_out, "Output text (stdout if absent)");
  tl->add_option("--schwa", tl_schwa, "retain | cluster | final");

  // train
  TrainFlags tf;
  std::string tr_in, tr_val, tr_out;
  auto* trn = app.add_subcommand("train", "Train a student encoder");
  add_train_flags(trn, tf);
  trn->add_option("--in", tr_in, "Training triplets JSONL")->required();
  trn->add_option("--val", tr_val, "Validation triplets JSONL")->required();
  trn->add_option("--out", tr_out, "Output directory")->required();

  // eval
  std::string ev_ckpt, ev_in, ev_out, ev_variant = "tl", ev_teacher;
  auto* ev = app.add_subcommand("eval", "Score a checkpoint on triplets");
  ev->add_option("--checkpoint", ev_ckpt, "Student checkpoint JSON")->required();
  ev->add_option("--in", ev_in, "Test triplets JSONL")->required();
  ev->add_option("--variant", ev_variant, "src | tr | tl");
  ev->add_option("--teacher", ev_teacher, "Teacher checkpoint; adds alignment distances");
  ev->add_option("--out", ev_out, "Metrics JSON (stdout if absent)");

  // project
  std::string pr_ckpt, pr_in, pr_out;
  auto* pr = app.add_subcommand("project", "2-D PCA of CLS vectors for src/tr/tl");
  pr->add_option("--checkpoint", pr_ckpt, "Checkpoint JSON")->required();
  pr->add_option("--in", pr_in, "Triplets JSONL")->required();
  pr->add_option("--out", pr_out, "CSV (stdout if absent)");

  // gradcheck
  std::uint64_t gc_seed = 0;
  int gc_instances = 20;
  double gc_eps = 1e-5, gc_tol = 1e-4;
  auto* gc = app.add_subcommand("gradcheck", "Finite-difference check of every primitive and the pipeline");
  gc->add_option("--seed", gc_seed, "Seed");
  gc->add_option("--instances", gc_instances, "Random instances per check");
  gc->add_option("--eps", gc_eps, "Central-difference step");
  gc->add_option("--tol", gc_tol, "Maximum relative error");

  // sweep
  TrainFlags sf;
  std::string sw_in, sw_val, sw_test, sw_out, sw_variant = "tl";
  std::vector<std::size_t> sw_k;
  auto* sw = app.add_subcommand("sweep", "Freeze-depth sweep, JSONL rows {k, weighted_f1}");
  add_train_flags(sw, sf);
  sw->add_option("--in", sw_in, "Training triplets JSONL")->required();
  sw->add_option("--val", sw_val, "Validation triplets JSONL")->required();
  sw->add_option("--test", sw_test, "Test triplets JSONL")->required();
  sw->add_option("--k", sw_k, "Freeze depths (default 0..L)");
  sw->add_option("--variant", sw_variant, "Test variant");
  sw->add_option("--out", sw_out, "JSONL (stdout if absent)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) {
      auto task = augment::make_synthetic_task(synth_cfg);
      augment::write_synthetic_task(task, synth_out);
      std::cerr << "wrote synthetic task to " << synth_out << " (seed " << synth_cfg.seed << ")\n";
    } else if (*aug) {
      auto table = load_table(aug_table, aug_schwa);
      auto corpus = augment::read_corpus(fs::path(aug_in));
      std::vector<augment::ParallelTriplet> triplets;
      if (aug_lexicon.empty()) {
        triplets = augment::build_triplets(corpus, augment::IdentityTranslator{}, table);
      } else {
        triplets = augment::build_triplets(corpus, augment::DictionaryTranslator::load_file(aug_lexicon), table);
      }
      augment::write_triplets(fs::path(aug_out), triplets);
      std::cerr << "augmented " << triplets.size() << " examples (schwa "
                << translit::to_string(table.schwa_policy()) << ")\n";
    } else if (*tl) {
      auto table = load_table(tl_table, tl_schwa);
      std::istringstream in(read_input(tl_in));
      std::string line, out;
      std::size_t unmapped = 0;
      while (std::getline(in, line)) {
        auto r = translit::transliterate(line, table);
        unmapped += r.unmapped_count;
        out += r.output + '\n';
      }
      emit(tl_out, out);
      std::cerr << "unmapped codepoints: " << unmapped << '\n';
    } else if (*trn) {
      auto cfg = resolve_config(tf);
      auto train_set = augment::read_triplets(fs::path(tr_in));
      auto val_set = augment::read_triplets(fs::path(tr_val));
      auto r = train::train(train_set, val_set, cfg);
      fs::create_directories(tr_out);
      const fs::path out(tr_out);
      enc::save_checkpoint(out / "checkpoint.json", r.tokenizer, r.best);
      if (r.teacher) enc::save_checkpoint(out / "teacher.json", r.tokenizer, *r.teacher);
      if (r.warm_start) enc::save_checkpoint(out / "warm_start.json", r.tokenizer, *r.warm_start);
      write_text(out / "history.jsonl", train::history_jsonl(r.history));
      write_text(out / "config.txt", train::format_config(cfg));
      std::cerr << "best epoch " << r.best_epoch << " val weighted_f1 " << r.best_score.weighted_f1
                << '\n';
    } else if (*ev) {
      auto ck = enc::load_checkpoint(ev_ckpt);
      auto triplets = augment::read_triplets(fs::path(ev_in));
      auto report = eval::evaluate_model(ck.params, ck.tokenizer, triplets, train::parse_variant(ev_variant));
      std::string text = eval::to_json(report);
      if (!ev_teacher.empty()) {
        auto teacher = enc::load_checkpoint(ev_teacher);
        text += eval::to_json(eval::alignment_diagnostics(teacher.params, ck.params, ck.tokenizer, triplets));
      }
      emit(ev_out, text);
    } else if (*pr) {
      auto ck = enc::load_checkpoint(pr_ckpt);
      auto triplets = augment::read_triplets(fs::path(pr_in));
      std::vector<std::string> texts, tags;
      const std::pair<train::Variant, const char*> groups[] = {
          {train::Variant::src, "en"}, {train::Variant::tr, "original"}, {train::Variant::tl, "romanized"}};
      for (const auto& [v, tag] : groups) {
        for (auto& t : train::texts_of(triplets, v)) {
          texts.push_back(std::move(t));
          tags.emplace_back(tag);
        }
      }
      auto vectors = enc::encode_texts(ck.params, ck.tokenizer, texts);
      emit(pr_out, eval::projection_csv(eval::project2d(vectors, tags)));
    } else if (*gc) {
      bool ok = true;
      auto line = [&](const std::string& name, const num::GradCheckReport& r) {
        ok = ok && r.passed;
        std::cout << (r.passed ? "PASS " : "FAIL ") << name << ' ' << r.summary() << '\n';
      };
      for (const auto& r : num::check_primitives(gc_seed, gc_instances, gc_eps, gc_tol)) line(r.name, r.report);
      line("pipeline", train::check_pipeline(gc_seed + 1, gc_instances, gc_eps, gc_tol));
      return ok ? 0 : 1;
    } else if (*sw) {
      auto cfg = resolve_config(sf);
      auto train_set = augment::read_triplets(fs::path(sw_in));
      auto val_set = augment::read_triplets(fs::path(sw_val));
      auto test_set = augment::read_triplets(fs::path(sw_test));
      if (sw_k.empty()) {
        for (std::size_t k = 0; k <= cfg.encoder.num_layers; ++k) sw_k.push_back(k);
      }
      auto rows = eval::freeze_sweep(train_set, val_set, test_set, cfg, sw_k, train::parse_variant(sw_variant));
      emit(sw_out, eval::sweep_jsonl(rows));
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
