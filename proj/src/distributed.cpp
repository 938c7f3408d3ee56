#include "bike/distributed.hpp"

#include <algorithm>
#include <barrier>
#include <thread>

namespace bike {

namespace {

std::vector<std::vector<std::size_t>> gathered_positives(const std::vector<int>& labels,
                                                         PositiveMode mode) {
  if (mode == PositiveMode::MultiPositive) return positive_sets(labels);
  std::vector<std::vector<std::size_t>> out(labels.size());
  for (std::size_t i = 0; i < labels.size(); ++i) out[i] = {i};
  return out;
}

void validate_states(const std::vector<WorkerState>& states) {
  if (states.empty()) throw InconsistentShardPlanError("no worker states");
  const ShardPlan plan = states.front().plan;
  if (states.size() != plan.workers) {
    throw InconsistentShardPlanError("worker count does not match the shard plan");
  }
  for (std::size_t w = 0; w < states.size(); ++w) {
    const WorkerState& s = states[w];
    if (s.worker_id != w || s.plan.workers != plan.workers ||
        s.plan.local_batch != plan.local_batch) {
      throw InconsistentShardPlanError("worker " + std::to_string(w) +
                                       " disagrees with the shard plan");
    }
    if (s.local_vision.rows() != plan.local_batch ||
        s.local_text.rows() != plan.local_batch ||
        s.local_vision.cols() != states.front().local_vision.cols() ||
        s.local_text.cols() != states.front().local_text.cols()) {
      throw InconsistentShardPlanError("worker " + std::to_string(w) +
                                       " holds a mis-shaped shard");
    }
  }
}

}  // namespace

std::vector<WorkerState> shard_batch(const Batch& batch, std::size_t workers) {
  if (workers < 1) throw InvalidArgumentError("need at least one worker");
  const std::size_t b = batch.video_embs.rows();
  if (b == 0 || batch.cat_embs.rows() != b) {
    throw DimMismatchError("batch video/category rows disagree");
  }
  if (b % workers != 0) {
    throw IndivisibleBatchError("batch size " + std::to_string(b) +
                                " is not divisible by " + std::to_string(workers) +
                                " workers");
  }
  const std::size_t local = b / workers;
  const std::size_t d = batch.video_embs.cols();

  std::vector<WorkerState> states(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    WorkerState& s = states[w];
    s.worker_id = w;
    s.plan = {workers, local};
    s.local_vision = Mat(local, d);
    s.local_text = Mat(local, d);
    for (std::size_t r = 0; r < local; ++r) {
      const std::size_t g = w * local + r;
      std::copy(batch.video_embs.row(g).begin(), batch.video_embs.row(g).end(),
                s.local_vision.row(r).begin());
      std::copy(batch.cat_embs.row(g).begin(), batch.cat_embs.row(g).end(),
                s.local_text.row(r).begin());
    }
  }
  return states;
}

void batch_gather(std::vector<WorkerState>& states) {
  validate_states(states);
  const ShardPlan plan = states.front().plan;
  const std::size_t global = plan.workers * plan.local_batch;
  const std::size_t d = states.front().local_vision.cols();

  Mat all_vision(global, d);
  Mat all_text(global, d);
  for (std::size_t w = 0; w < plan.workers; ++w) {
    for (std::size_t r = 0; r < plan.local_batch; ++r) {
      const std::size_t g = w * plan.local_batch + r;
      std::copy(states[w].local_vision.row(r).begin(), states[w].local_vision.row(r).end(),
                all_vision.row(g).begin());
      std::copy(states[w].local_text.row(r).begin(), states[w].local_text.row(r).end(),
                all_text.row(g).begin());
    }
  }
  for (WorkerState& s : states) {
    s.gathered_vision = all_vision;
    s.gathered_text = all_text;
  }
}

double shard_loss(const WorkerState& state, const std::vector<int>& labels, double tau,
                  PositiveMode mode) {
  if (state.gathered_vision.empty() || state.gathered_text.empty()) {
    throw GatherNotRunError("worker " + std::to_string(state.worker_id) +
                            " asked for its loss before the gather completed");
  }
  if (!(tau > 0.0)) throw NonPositiveTemperatureError("temperature must be positive");
  const std::size_t global = state.plan.workers * state.plan.local_batch;
  if (labels.size() != global) {
    throw DimMismatchError("labels must cover the global batch");
  }
  const auto positives = gathered_positives(labels, mode);
  const std::size_t local = state.plan.local_batch;
  const std::size_t offset = state.worker_id * local;

  Vec logits(global);
  double acc = 0.0;
  for (std::size_t r = 0; r < local; ++r) {
    const std::size_t g = offset + r;
    // logits_per_vision row: local vision against all gathered text columns
    for (std::size_t j = 0; j < global; ++j) {
      logits[j] = dot(state.local_vision.row(r), state.gathered_text.row(j)) / tau;
    }
    const double vision_row = multipositive_row_loss(logits, positives[g]);
    // logits_per_text row: local text against all gathered vision columns
    for (std::size_t j = 0; j < global; ++j) {
      logits[j] = dot(state.local_text.row(r), state.gathered_vision.row(j)) / tau;
    }
    const double text_row = multipositive_row_loss(logits, positives[g]);
    acc += 0.5 * (vision_row + text_row);
  }
  return acc / static_cast<double>(local);
}

DistributedResult distributed_loss(const Batch& batch, std::size_t workers, double tau,
                                   PositiveMode mode, ExecutionMode exec) {
  if (batch.labels.size() != batch.video_embs.rows()) {
    throw DimMismatchError("labels must cover the batch");
  }
  std::vector<WorkerState> states = shard_batch(batch, workers);
  DistributedResult result;
  result.per_worker.assign(workers, 0.0);

  if (exec == ExecutionMode::Sequential || workers == 1) {
    batch_gather(states);
    for (std::size_t w = 0; w < workers; ++w) {
      result.per_worker[w] = shard_loss(states[w], batch.labels, tau, mode);
    }
  } else {
    validate_states(states);
    const std::size_t local = states.front().plan.local_batch;
    const std::size_t d = states.front().local_vision.cols();
    Mat all_vision(workers * local, d);
    Mat all_text(workers * local, d);
    std::barrier sync(static_cast<std::ptrdiff_t>(workers));

    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
      threads.emplace_back([&, w]() {
        WorkerState& s = states[w];
        for (std::size_t r = 0; r < local; ++r) {
          const std::size_t g = w * local + r;
          std::copy(s.local_vision.row(r).begin(), s.local_vision.row(r).end(),
                    all_vision.row(g).begin());
          std::copy(s.local_text.row(r).begin(), s.local_text.row(r).end(),
                    all_text.row(g).begin());
        }
        // No worker proceeds to its loss until everyone has contributed.
        sync.arrive_and_wait();
        s.gathered_vision = all_vision;
        s.gathered_text = all_text;
        result.per_worker[w] = shard_loss(s, batch.labels, tau, mode);
      });
    }
    for (std::thread& t : threads) t.join();
  }

  // Fixed left fold in ascending worker order keeps the reduction
  // bit-deterministic.
  double acc = 0.0;
  for (std::size_t w = 0; w < workers; ++w) acc += result.per_worker[w];
  result.loss = acc / static_cast<double>(workers);
  return result;
}

}  // namespace bike
