// SPDX-License-Identifier: Apache-2.0
#include "xlt/trainer/trainer.hpp"

#include <algorithm>
#include <random>

#include "json.hpp"
#include "xlt/error.hpp"
#include "xlt/eval/metrics.hpp"
#include "xlt/num/losses.hpp"
#include "xlt/num/ops.hpp"

namespace xlt::train {

using num::Graph;
using num::Tensor;
using num::Var;

namespace {

void shuffle(std::vector<std::size_t>& v, std::mt19937_64& rng) {
  for (std::size_t i = v.size(); i > 1; --i) std::swap(v[i - 1], v[rng() % i]);
}

std::vector<std::size_t> iota(std::size_t n) {
  std::vector<std::size_t> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = i;
  return v;
}

void apply_adam(enc::EncoderParams& student, Graph& g, const std::vector<Var>& vars,
                num::AdamState& adam) {
  std::vector<Tensor*> params;
  std::vector<Tensor> grads;
  for (std::size_t i = 0; i < vars.size(); ++i) {
    auto& p = student.params()[i];
    if (!p.trainable) continue;
    params.push_back(&p.value);
    grads.push_back(g.grad(vars[i]));
  }
  num::adam_step(params, grads, adam);
}

Var positive_prob(Var logits) { return num::column(num::softmax_rows(logits), 1); }

void accumulate(BatchLosses& sum, const BatchLosses& b) {
  sum.l_ts += b.l_ts;
  sum.l_tr += b.l_tr;
  sum.l_tl += b.l_tl;
  sum.l_u += b.l_u;
  sum.j_joint += b.j_joint;
  sum.total += b.total;
}

BatchLosses averaged(BatchLosses s, std::size_t n) {
  const double k = 1.0 / static_cast<double>(n);
  return {s.l_ts * k, s.l_tr * k, s.l_tl * k, s.l_u * k, s.j_joint * k, s.total * k};
}

}  // namespace

const std::string& text_of(const ParallelTriplet& t, Variant v) {
  switch (v) {
    case Variant::src:
      return t.src;
    case Variant::tr:
      return t.tr;
    case Variant::tl:
      return t.tl;
  }
  return t.tl;
}

std::vector<std::string> texts_of(std::span<const ParallelTriplet> triplets, Variant v) {
  std::vector<std::string> out;
  out.reserve(triplets.size());
  for (const auto& t : triplets) out.push_back(text_of(t, v));
  return out;
}

std::vector<double> labels_of(std::span<const ParallelTriplet> triplets) {
  std::vector<double> out;
  out.reserve(triplets.size());
  for (const auto& t : triplets) out.push_back(static_cast<double>(t.label));
  return out;
}

enc::TokenizerSpec build_tokenizer(std::span<const ParallelTriplet> triplets,
                                   std::size_t max_sequence_length) {
  std::vector<std::string> all;
  for (Variant v : {Variant::src, Variant::tr, Variant::tl}) {
    auto t = texts_of(triplets, v);
    all.insert(all.end(), t.begin(), t.end());
  }
  return enc::TokenizerSpec::build(all, max_sequence_length);
}

num::AdamState make_adam(const TrainConfig& cfg) {
  num::AdamState s;
  s.lr = cfg.learning_rate;
  s.beta1 = cfg.adam_beta1;
  s.beta2 = cfg.adam_beta2;
  s.eps = cfg.adam_eps;
  return s;
}

BatchLosses classification_step(enc::EncoderParams& student, const enc::TokenizerSpec& tokenizer,
                                std::span<const std::string> texts,
                                std::span<const double> labels, num::AdamState& adam) {
  if (texts.empty() || texts.size() != labels.size()) {
    throw ShapeError("classification_step: texts and labels must be non-empty and equal in size");
  }
  Graph g;
  auto vars = enc::bind(g, student);
  auto f = enc::forward(student, vars, enc::tokenize_batch(texts, tokenizer));
  Var loss = num::bce_loss(f.p_positive, labels);
  g.backward(loss);
  apply_adam(student, g, vars, adam);
  BatchLosses out;
  out.j_joint = out.total = loss.value().item();
  return out;
}

ObjectiveVars joint_objective(const enc::EncoderParams& student, std::span<const Var> vars,
                              std::span<const ParallelTriplet> batch, Var teacher_h_src,
                              const enc::TokenizerSpec& tokenizer, const TrainConfig& cfg) {
  const std::size_t B = batch.size();
  std::vector<std::string> texts;
  texts.reserve(3 * B);
  for (Variant v : {Variant::src, Variant::tr, Variant::tl}) {
    for (const auto& t : batch) texts.push_back(text_of(t, v));
  }
  const auto labels = labels_of(batch);
  // One forward over the stacked variants; rows [kB, (k+1)B) hold variant k.
  auto f = enc::forward(student, vars, enc::tokenize_batch(texts, tokenizer));
  Var h[3], p[3];
  for (std::size_t k = 0; k < 3; ++k) {
    std::vector<std::size_t> rows(B);
    for (std::size_t i = 0; i < B; ++i) rows[i] = k * B + i;
    h[k] = num::gather_rows(f.h, rows);
    p[k] = positive_prob(num::gather_rows(f.logits, rows));
  }
  AlignmentVars align = alignment_loss(teacher_h_src, h[0], h[1], h[2], cfg.weights);
  Var j = joint_classification_loss(p[0], p[1], p[2], labels);
  Var total = cfg.mode == Mode::joint ? j : total_loss(j, align.l_u, cfg.weights.alpha);
  return {align.l_ts, align.l_tr, align.l_tl, align.l_u, j, total};
}

BatchLosses train_step(std::span<const ParallelTriplet> batch, const Tensor& teacher_h_src,
                       enc::EncoderParams& student, const enc::TokenizerSpec& tokenizer,
                       const TrainConfig& cfg, num::AdamState& adam) {
  const std::size_t B = batch.size();
  if (B == 0) throw ContractError("train_step: empty batch");
  if (teacher_h_src.rank() != 2 || teacher_h_src.rows() != B ||
      teacher_h_src.cols() != student.config().hidden_dim) {
    throw ShapeError("train_step: teacher vectors " + num::shape_str(teacher_h_src.shape()) +
                     " for a batch of " + std::to_string(B));
  }
  Graph g;
  auto vars = enc::bind(g, student);
  const ObjectiveVars o = joint_objective(student, vars, batch, g.leaf(teacher_h_src, false), tokenizer, cfg);
  g.backward(o.total);
  apply_adam(student, g, vars, adam);

  BatchLosses out;
  out.l_ts = o.l_ts.value().item();
  out.l_tr = o.l_tr.value().item();
  out.l_tl = o.l_tl.value().item();
  out.l_u = o.l_u.value().item();
  out.j_joint = o.j_joint.value().item();
  out.total = o.total.value().item();
  return out;
}

BatchLosses train_step(std::span<const ParallelTriplet> batch, const enc::EncoderParams& teacher,
                       enc::EncoderParams& student, const enc::TokenizerSpec& tokenizer,
                       const TrainConfig& cfg, num::AdamState& adam) {
  for (const auto& p : teacher.params()) {
    if (p.trainable) throw ContractError("train_step: teacher must be fully frozen");
  }
  const auto src = texts_of(batch, Variant::src);
  return train_step(batch, enc::encode_texts(teacher, tokenizer, src), student, tokenizer, cfg,
                    adam);
}

ValidationScore validate(const enc::EncoderParams& params, const enc::TokenizerSpec& tokenizer,
                         std::span<const ParallelTriplet> val, Variant variant) {
  const auto texts = texts_of(val, variant);
  const auto probs = enc::predict_positive(params, tokenizer, texts);
  std::vector<int> preds(probs.size()), labels(val.size());
  for (std::size_t i = 0; i < probs.size(); ++i) {
    preds[i] = probs[i] > 0.5 ? 1 : 0;
    labels[i] = val[i].label;
  }
  auto r = eval::evaluate(preds, labels);
  return {r.accuracy, r.weighted_f1};
}

TrainResult train(std::span<const ParallelTriplet> train_set, std::span<const ParallelTriplet> val_set,
                  const TrainConfig& cfg_in, const ValidationHook& hook,
                  const std::optional<enc::TokenizerSpec>& tokenizer) {
  if (train_set.empty()) throw ContractError("train: empty training set");
  if (val_set.empty() && !hook) throw ContractError("train: empty validation set");
  TrainConfig cfg = cfg_in;
  cfg.encoder.freeze_depth = cfg.freeze_depth;
  cfg.validate();

  TrainResult res;
  res.tokenizer = tokenizer ? *tokenizer : build_tokenizer(train_set, cfg.max_sequence_length);
  enc::EncoderConfig init_cfg = cfg.encoder;
  init_cfg.freeze_depth = 0;
  enc::EncoderParams student = enc::EncoderParams::init(init_cfg, res.tokenizer.vocab_size(), cfg.seed);
  std::mt19937_64 rng(cfg.seed + 1);
  const std::size_t N = train_set.size();

  Tensor teacher_h;
  if (uses_teacher(cfg.mode)) {
    // Source-only warm-up, then freeze a copy as the anchor.
    num::AdamState warm_adam = make_adam(cfg);
    const auto src = texts_of(train_set, Variant::src);
    const auto labels = labels_of(train_set);
    for (std::size_t e = 0; e < cfg.teacher_warmup_epochs; ++e) {
      auto order = iota(N);
      shuffle(order, rng);
      for (std::size_t b = 0; b < N; b += cfg.batch_size) {
        std::vector<std::string> texts;
        std::vector<double> ys;
        for (std::size_t i = b; i < std::min(N, b + cfg.batch_size); ++i) {
          texts.push_back(src[order[i]]);
          ys.push_back(labels[order[i]]);
        }
        classification_step(student, res.tokenizer, texts, ys, warm_adam);
      }
    }
    res.warm_start = student;
    res.teacher = enc::make_teacher(student);
    teacher_h = enc::encode_texts(*res.teacher, res.tokenizer, src);
  }
  student.set_freeze_depth(cfg.freeze_depth);
  num::AdamState adam = make_adam(cfg);

  // Baseline example pool: (triplet index, variant).
  std::vector<std::pair<std::size_t, Variant>> pool;
  switch (cfg.mode) {
    case Mode::en:
    case Mode::tr:
    case Mode::tl: {
      const Variant v = cfg.mode == Mode::en ? Variant::src : cfg.mode == Mode::tr ? Variant::tr : Variant::tl;
      for (std::size_t i = 0; i < N; ++i) pool.emplace_back(i, v);
      break;
    }
    case Mode::en_tr_tl:
      for (Variant v : {Variant::src, Variant::tr, Variant::tl}) {
        for (std::size_t i = 0; i < N; ++i) pool.emplace_back(i, v);
      }
      break;
    default:
      break;
  }

  const std::size_t d = cfg.encoder.hidden_dim;
  bool have_best = false;
  std::size_t since_best = 0;
  for (std::size_t epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    BatchLosses sum;
    std::size_t batches = 0;
    if (uses_teacher(cfg.mode)) {
      auto order = iota(N);
      shuffle(order, rng);
      for (std::size_t b = 0; b < N; b += cfg.batch_size) {
        const std::size_t n = std::min(cfg.batch_size, N - b);
        std::vector<ParallelTriplet> batch;
        Tensor th(num::Shape{n, d});
        for (std::size_t i = 0; i < n; ++i) {
          batch.push_back(train_set[order[b + i]]);
          std::copy_n(teacher_h.ptr() + order[b + i] * d, d, th.ptr() + i * d);
        }
        BatchLosses l = train_step(batch, th, student, res.tokenizer, cfg, adam);
        res.batch_log.push_back(l);
        accumulate(sum, l);
        ++batches;
      }
    } else {
      auto order = iota(pool.size());
      shuffle(order, rng);
      for (std::size_t b = 0; b < pool.size(); b += cfg.batch_size) {
        std::vector<std::string> texts;
        std::vector<double> ys;
        for (std::size_t i = b; i < std::min(pool.size(), b + cfg.batch_size); ++i) {
          const auto& [idx, v] = pool[order[i]];
          texts.push_back(text_of(train_set[idx], v));
          ys.push_back(static_cast<double>(train_set[idx].label));
        }
        BatchLosses l = classification_step(student, res.tokenizer, texts, ys, adam);
        res.batch_log.push_back(l);
        accumulate(sum, l);
        ++batches;
      }
    }

    const ValidationScore score =
        hook ? hook(epoch, student) : validate(student, res.tokenizer, val_set, cfg.val_variant);
    res.history.push_back({epoch, averaged(sum, batches), score.accuracy, score.weighted_f1});

    const bool improved =
        !have_best || score.weighted_f1 > res.best_score.weighted_f1 ||
        (score.weighted_f1 == res.best_score.weighted_f1 && score.accuracy > res.best_score.accuracy);
    if (improved) {
      have_best = true;
      res.best_score = score;
      res.best_epoch = epoch;
      res.best = student;
      since_best = 0;
    } else if (++since_best >= cfg.patience) {
      break;
    }
  }
  return res;
}

std::string history_jsonl(std::span<const EpochRecord> history) {
  std::string out;
  for (const auto& r : history) {
    nlohmann::ordered_json j{{"epoch", r.epoch},
                             {"l_ts", r.losses.l_ts},
                             {"l_tr", r.losses.l_tr},
                             {"l_tl", r.losses.l_tl},
                             {"l_u", r.losses.l_u},
                             {"j_joint", r.losses.j_joint},
                             {"total", r.losses.total},
                             {"val_accuracy", r.val_accuracy},
                             {"val_weighted_f1", r.val_weighted_f1}};
    out += j.dump() + '\n';
  }
  return out;
}

}  // namespace xlt::train
