#pragma once

#include <vector>

#include "bike/objective.hpp"

namespace bike {

// Worker w owns contiguous global rows [w*local_batch, (w+1)*local_batch).
struct ShardPlan {
  std::size_t workers = 1;
  std::size_t local_batch = 0;
};

struct WorkerState {
  std::size_t worker_id = 0;
  ShardPlan plan;
  Mat local_vision, local_text;        // local_batch x d
  Mat gathered_vision, gathered_text;  // (workers * local_batch) x d, empty until gather
};

// MultiPositive keeps the K(i) sets inside the gathered loss; Diagonal is
// strict pseudocode parity where each row's only positive is itself.
enum class PositiveMode { MultiPositive, Diagonal };

enum class ExecutionMode { Sequential, Concurrent };

// Splits the batch's video/category rows across `workers` contiguous shards.
std::vector<WorkerState> shard_batch(const Batch& batch, std::size_t workers);

// In-process gather: after the call every worker holds the full global
// matrices, rows in global order, bit-identical across workers.
void batch_gather(std::vector<WorkerState>& states);

// Symmetric multi-positive cross-entropy over the worker's local rows against
// all gathered columns, averaged over its local rows.
double shard_loss(const WorkerState& state, const std::vector<int>& labels, double tau,
                  PositiveMode mode = PositiveMode::MultiPositive);

struct DistributedResult {
  double loss = 0.0;
  std::vector<double> per_worker;
};

// Mean of per-worker losses, reduced in ascending worker order. Sequential
// and concurrent execution produce bitwise-identical results.
DistributedResult distributed_loss(const Batch& batch, std::size_t workers, double tau,
                                   PositiveMode mode = PositiveMode::MultiPositive,
                                   ExecutionMode exec = ExecutionMode::Sequential);

}  // namespace bike
