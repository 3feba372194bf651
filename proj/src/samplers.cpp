#include "tvdeblur/samplers.hpp"

#include <atomic>
#include <condition_variable>
#include <cstring>
#include <functional>
#include <mutex>
#include <thread>

#include "tvdeblur/kernels.hpp"

namespace tvdeblur {

void adapt_step(StepSizeState& state, double observed_alpha) {
  if (!state.adapting) throw std::logic_error("adapt_step: adaptation is frozen");
  state.iteration += 1;
  const double gamma = std::pow(static_cast<double>(state.iteration), -0.6);
  state.tau *= std::exp(gamma * (observed_alpha - state.target_accept));
}

ColorSchedule make_color_schedule(const BlockPartition& part) {
  ColorSchedule sched;
  for (int id = 0; id < part.b; ++id) {
    const int l = (part.block_row(id) & 1) + 2 * (part.block_col(id) & 1);
    sched.classes[l].push_back(id);
  }
  return sched;
}

namespace {

void gather_core(const Image& x, const Rect& core, double* out) {
  for (int c = 0; c < core.cols; ++c)
    std::memcpy(out + static_cast<size_t>(c) * core.rows, &x.data[x.index(core.r0, core.c0 + c)],
                sizeof(double) * core.rows);
}

void scatter_core(const double* in, const Rect& core, Image& x) {
  for (int c = 0; c < core.cols; ++c)
    std::memcpy(&x.data[x.index(core.r0, core.c0 + c)], in + static_cast<size_t>(c) * core.rows,
                sizeof(double) * core.rows);
}

[[noreturn]] void abort_nonfinite(const char* where, int block_id, uint32_t cycle) {
  throw std::runtime_error(std::string("sampler: non-finite ") + where + " at block " +
                           std::to_string(block_id) + ", cycle " + std::to_string(cycle) +
                           "; state dump suppressed, chain aborted");
}

bool all_finite(const double* v, size_t len) {
  for (size_t i = 0; i < len; ++i)
    if (!std::isfinite(v[i])) return false;
  return true;
}

}  // namespace

UpdateOutcome mlwg_update_block(const PosteriorSpec& spec, const BlockPartition& part, Image& x,
                                int block_id, uint32_t cycle, uint64_t seed, uint32_t chain_id,
                                double tau, MlwgWorkspace& ws) {
  const int q = part.q;
  build_contexts_into(spec, part, x, block_id, ws.like, ws.prior, ws.loc);

  ws.xb.resize(q);
  ws.zb.resize(q);
  ws.grad0.resize(q);
  ws.grad1.resize(q);
  ws.xi.resize(q);
  ws.tmp.resize(q);
  gather_core(x, ws.like.core, ws.xb.data());

  double val0;
  local_logdensity_and_grad_into(ws.like, ws.prior, ws.xb, spec, ws.loc, val0, ws.grad0.data());
  if (!std::isfinite(val0) || !all_finite(ws.grad0.data(), q))
    abort_nonfinite("log-density/gradient at current state", block_id, cycle);

  RngStream stream(StreamId{seed, chain_id, stream_purpose::block_update,
                            static_cast<uint32_t>(block_id), cycle});
  stream.fill_normals(ws.xi);
  kernels::mala_step(ws.xb.data(), ws.grad0.data(), ws.xi.data(), tau, std::sqrt(2.0 * tau),
                     ws.zb.data(), q);

  double val1;
  local_logdensity_and_grad_into(ws.like, ws.prior, ws.zb, spec, ws.loc, val1, ws.grad1.data());

  double log_alpha;
  if (!std::isfinite(val1)) {
    log_alpha = -std::numeric_limits<double>::infinity();
  } else {
    kernels::drift_resid(ws.xb.data(), ws.zb.data(), ws.grad1.data(), tau, ws.tmp.data(), q);
    const double rev = kernels::sumsq(ws.tmp.data(), q);
    kernels::drift_resid(ws.zb.data(), ws.xb.data(), ws.grad0.data(), tau, ws.tmp.data(), q);
    const double fwd = kernels::sumsq(ws.tmp.data(), q);
    log_alpha = (val1 - val0) + (fwd - rev) / (4.0 * tau);
  }

  const double u = stream.uniform01();
  UpdateOutcome out;
  out.log_alpha = log_alpha;
  out.accepted = std::log(u) < log_alpha;
  if (out.accepted) scatter_core(ws.zb.data(), ws.like.core, x);
  return out;
}

namespace {

/// Persistent fork-join pool for the chromatic phases. run() hands each
/// worker (including the calling thread, as worker 0) blocks from the
/// phase list until exhausted, then joins.
class BlockPool {
 public:
  explicit BlockPool(int workers) : workers_(std::max(1, workers)) {
    for (int w = 1; w < workers_; ++w)
      threads_.emplace_back([this, w] { worker_loop(w); });
  }

  ~BlockPool() {
    {
      std::lock_guard<std::mutex> lock(mu_);
      stop_ = true;
      ++generation_;
    }
    cv_.notify_all();
    for (auto& t : threads_) t.join();
  }

  int workers() const { return workers_; }

  void run(const std::vector<int>& blocks, const std::function<void(int, int)>& fn) {
    if (workers_ == 1 || blocks.size() <= 1) {
      for (int id : blocks) fn(0, id);
      return;
    }
    {
      std::lock_guard<std::mutex> lock(mu_);
      blocks_ = &blocks;
      fn_ = &fn;
      next_.store(0, std::memory_order_relaxed);
      pending_ = workers_ - 1;
      ++generation_;
    }
    cv_.notify_all();
    drain(0);
    std::unique_lock<std::mutex> lock(mu_);
    done_cv_.wait(lock, [this] { return pending_ == 0; });
    blocks_ = nullptr;
    fn_ = nullptr;
    if (failure_) {
      std::exception_ptr e = failure_;
      failure_ = nullptr;
      std::rethrow_exception(e);
    }
  }

 private:
  void drain(int worker) {
    const auto& blocks = *blocks_;
    const auto& fn = *fn_;
    for (;;) {
      const size_t i = next_.fetch_add(1, std::memory_order_relaxed);
      if (i >= blocks.size()) break;
      try {
        fn(worker, blocks[i]);
      } catch (...) {
        // A failed block update poisons the whole chain; surface the first
        // exception on the calling thread after the phase joins.
        std::lock_guard<std::mutex> lock(mu_);
        if (!failure_) failure_ = std::current_exception();
      }
    }
  }

  void worker_loop(int worker) {
    uint64_t seen = 0;
    for (;;) {
      std::unique_lock<std::mutex> lock(mu_);
      cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      lock.unlock();
      drain(worker);
      lock.lock();
      if (--pending_ == 0) done_cv_.notify_one();
    }
  }

  int workers_;
  std::vector<std::thread> threads_;
  std::mutex mu_;
  std::condition_variable cv_;
  std::condition_variable done_cv_;
  const std::vector<int>* blocks_ = nullptr;
  const std::function<void(int, int)>* fn_ = nullptr;
  std::atomic<size_t> next_{0};
  int pending_ = 0;
  uint64_t generation_ = 0;
  bool stop_ = false;
  std::exception_ptr failure_ = nullptr;
};

struct ChainRecorder {
  SampleChain chain;
  long total_cycles;
  long burn_in;
  int thin;

  ChainRecorder(const PosteriorSpec& spec, const SamplerConfig& cfg, uint32_t chain_id, int blocks) {
    chain.n = spec.n();
    chain.n_saved = 0;
    chain.thin = cfg.thin;
    chain.chain_id = chain_id;
    chain.samples.reserve(static_cast<size_t>(cfg.n_saved) * spec.d());
    chain.block_stats.assign(blocks, BlockStats{});
    burn_in = cfg.burn_in;
    thin = cfg.thin;
    total_cycles = cfg.burn_in + cfg.n_saved * static_cast<long>(cfg.thin);
  }

  bool sampling_phase(long cycle) const { return cycle > burn_in; }

  void maybe_store(long cycle, const Image& x) {
    if (cycle > burn_in && (cycle - burn_in) % thin == 0) {
      chain.samples.insert(chain.samples.end(), x.data.begin(), x.data.end());
      chain.n_saved += 1;
    }
  }

  void finalize(const std::vector<StepSizeState>& steps) {
    long acc = 0, prop = 0;
    for (size_t i = 0; i < chain.block_stats.size(); ++i) {
      auto& bs = chain.block_stats[i];
      bs.tau = steps[i].tau;
      bs.accept_rate = bs.proposals > 0 ? static_cast<double>(bs.accepted) / bs.proposals : 0.0;
      acc += bs.accepted;
      prop += bs.proposals;
    }
    chain.mean_accept = prop > 0 ? static_cast<double>(acc) / prop : 0.0;
  }
};

void validate_sampler_inputs(const PosteriorSpec& spec, const Image& init, const SamplerConfig& cfg) {
  if (!(spec.epsilon > 0.0))
    throw std::invalid_argument("sampler: epsilon must be positive (smoothed posterior only)");
  if (init.n != spec.n()) throw std::invalid_argument("sampler: init image side mismatch");
  if (cfg.n_saved < 0 || cfg.burn_in < 0 || cfg.thin < 1)
    throw std::invalid_argument("sampler: invalid burn_in/n_saved/thin");
  if (!(cfg.tau0 > 0.0)) throw std::invalid_argument("sampler: tau0 must be positive");
  if (!init.all_finite()) throw std::invalid_argument("sampler: init image has non-finite pixels");
}

}  // namespace

SampleChain run_mala(const PosteriorSpec& spec, const Image& init, const SamplerConfig& cfg,
                     uint64_t seed, uint32_t chain_id) {
  validate_sampler_inputs(spec, init, cfg);
  const int d = spec.d();

  Image x = init;
  GlobalWorkspace gws;
  std::vector<double> grad_cur(d), grad_new(d), xi(d), z(d), tmp(d);
  double val_cur;
  log_posterior_and_grad(spec, x, gws, val_cur, grad_cur.data());
  if (!std::isfinite(val_cur) || !all_finite(grad_cur.data(), d))
    abort_nonfinite("log-density/gradient at init", 0, 0);

  std::vector<StepSizeState> steps(1);
  steps[0].tau = cfg.tau0;
  steps[0].target_accept = cfg.target_accept;

  ChainRecorder rec(spec, cfg, chain_id, 1);
  Image zimg(spec.n());

  for (long cycle = 1; cycle <= rec.total_cycles; ++cycle) {
    const double tau = steps[0].tau;
    RngStream stream(StreamId{seed, chain_id, stream_purpose::block_update, 0,
                              static_cast<uint32_t>(cycle)});
    stream.fill_normals(xi);
    kernels::mala_step(x.data.data(), grad_cur.data(), xi.data(), tau, std::sqrt(2.0 * tau),
                       zimg.data.data(), d);

    double val_new;
    log_posterior_and_grad(spec, zimg, gws, val_new, grad_new.data());

    double log_alpha;
    if (!std::isfinite(val_new)) {
      log_alpha = -std::numeric_limits<double>::infinity();
    } else {
      kernels::drift_resid(x.data.data(), zimg.data.data(), grad_new.data(), tau, tmp.data(), d);
      const double rev = kernels::sumsq(tmp.data(), d);
      kernels::drift_resid(zimg.data.data(), x.data.data(), grad_cur.data(), tau, tmp.data(), d);
      const double fwd = kernels::sumsq(tmp.data(), d);
      log_alpha = (val_new - val_cur) + (fwd - rev) / (4.0 * tau);
    }

    const double u = stream.uniform01();
    const bool accepted = std::log(u) < log_alpha;
    if (accepted) {
      std::swap(x.data, zimg.data);
      std::swap(grad_cur, grad_new);
      val_cur = val_new;
    }

    if (cfg.adapt && cycle <= cfg.burn_in)
      adapt_step(steps[0], accepted ? 1.0 : 0.0);
    if (rec.sampling_phase(cycle)) {
      rec.chain.block_stats[0].proposals += 1;
      rec.chain.block_stats[0].accepted += accepted ? 1 : 0;
    }
    rec.maybe_store(cycle, x);
  }

  rec.finalize(steps);
  return rec.chain;
}

namespace {

SampleChain run_mlwg_impl(const PosteriorSpec& spec, const BlockPartition& part, const Image& init,
                          const SamplerConfig& cfg, uint64_t seed, uint32_t chain_id,
                          bool chromatic, int workers) {
  validate_sampler_inputs(spec, init, cfg);
  if (part.n != spec.n())
    throw std::invalid_argument("sampler: partition does not match posterior image side");

  Image x = init;
  std::vector<StepSizeState> steps(part.b);
  for (auto& s : steps) {
    s.tau = cfg.tau0;
    s.target_accept = cfg.target_accept;
  }

  ChainRecorder rec(spec, cfg, chain_id, part.b);

  const ColorSchedule sched = chromatic ? make_color_schedule(part) : ColorSchedule{};
  std::vector<int> all_blocks;
  if (!chromatic) {
    all_blocks.resize(part.b);
    for (int i = 0; i < part.b; ++i) all_blocks[i] = i;
  }

  BlockPool pool(chromatic ? workers : 1);
  std::vector<MlwgWorkspace> wss(pool.workers());
  std::vector<UpdateOutcome> outcomes(part.b);

  for (long cycle = 1; cycle <= rec.total_cycles; ++cycle) {
    const bool adapting = cfg.adapt && cycle <= cfg.burn_in;
    auto update_one = [&](int worker, int id) {
      outcomes[id] = mlwg_update_block(spec, part, x, id, static_cast<uint32_t>(cycle), seed,
                                       chain_id, steps[id].tau, wss[worker]);
    };
    if (chromatic) {
      for (const auto& cls : sched.classes)
        if (!cls.empty()) pool.run(cls, update_one);
    } else {
      for (int id : all_blocks) update_one(0, id);
    }

    for (int id = 0; id < part.b; ++id) {
      const bool acc = outcomes[id].accepted;
      if (adapting) adapt_step(steps[id], acc ? 1.0 : 0.0);
      if (rec.sampling_phase(cycle)) {
        rec.chain.block_stats[id].proposals += 1;
        rec.chain.block_stats[id].accepted += acc ? 1 : 0;
      }
    }
    rec.maybe_store(cycle, x);
  }

  rec.finalize(steps);
  return rec.chain;
}

}  // namespace

SampleChain run_mlwg_sequential(const PosteriorSpec& spec, const BlockPartition& part,
                                const Image& init, const SamplerConfig& cfg, uint64_t seed,
                                uint32_t chain_id) {
  return run_mlwg_impl(spec, part, init, cfg, seed, chain_id, /*chromatic=*/false, 1);
}

SampleChain run_mlwg_parallel(const PosteriorSpec& spec, const BlockPartition& part,
                              const Image& init, const SamplerConfig& cfg, uint64_t seed,
                              uint32_t chain_id) {
  if (cfg.workers < 1) throw std::invalid_argument("run_mlwg_parallel: workers must be >= 1");
  return run_mlwg_impl(spec, part, init, cfg, seed, chain_id, /*chromatic=*/true, cfg.workers);
}

}  // namespace tvdeblur
