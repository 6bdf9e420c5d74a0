#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <deque>
#include <limits>
#include <optional>
#include <ostream>
#include <queue>
#include <sstream>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "pim/core/config.hpp"
#include "pim/timing/memory.hpp"
#include "pim/timing/pipeline.hpp"

namespace pim::rt {

enum class SyncKind : std::uint8_t {
    barrier, mutex_lock, mutex_unlock, handshake_notify, handshake_wait, sem_give, sem_take,
};

inline constexpr std::string_view name(SyncKind k) {
    constexpr std::string_view names[] = {"barrier",          "mutex_lock",     "mutex_unlock", "handshake_notify",
                                          "handshake_wait",   "sem_give",       "sem_take"};
    return names[static_cast<int>(k)];
}

struct SyncEvent {
    SyncKind kind = SyncKind::barrier;
    std::uint32_t object = 0;
    friend bool operator==(const SyncEvent&, const SyncEvent&) = default;
};

struct DmaEvent {
    DmaDirection direction = DmaDirection::mram_to_wram;
    std::uint32_t size = 8;
    friend bool operator==(const DmaEvent&, const DmaEvent&) = default;
};

using Action = std::variant<DmaEvent, SyncEvent>;

// A compute burst followed by the action the tasklet yields on; no action means the tasklet ends.
struct Step {
    std::uint64_t instructions = 0;
    std::optional<Action> action;
    friend bool operator==(const Step&, const Step&) = default;
};

using TaskletTrace = std::vector<Step>;

// One record per line: "<tasklet> compute <n>", "<tasklet> dma read|write <bytes>",
// "<tasklet> sync <kind> <object>", "<tasklet> end".
inline void dump_trace(std::ostream& os, unsigned tasklet, const TaskletTrace& trace) {
    for (const Step& s : trace) {
        if (s.instructions > 0) os << tasklet << " compute " << s.instructions << '\n';
        if (!s.action) {
            os << tasklet << " end\n";
        } else if (const auto* d = std::get_if<DmaEvent>(&*s.action)) {
            os << tasklet << " dma " << name(d->direction) << ' ' << d->size << '\n';
        } else {
            const auto& e = std::get<SyncEvent>(*s.action);
            os << tasklet << " sync " << name(e.kind) << ' ' << e.object << '\n';
        }
    }
}

class StepSource {
  public:
    virtual ~StepSource() = default;
    // Runs tasklet `t` up to its next yield point.
    virtual Step next(unsigned t) = 0;
};

class DeadlockError : public std::runtime_error {
  public:
    using std::runtime_error::runtime_error;
};

class SyncError : public std::logic_error {
  public:
    using std::logic_error::logic_error;
};

struct KernelTimeline {
    std::uint64_t total_cycles = 0;
    std::uint64_t pipeline_busy_cycles = 0;
    std::uint64_t dma_busy_cycles = 0;
    std::uint64_t sync_stall_cycles = 0;
    std::uint64_t instructions = 0;
    std::uint64_t spin_instructions = 0;
    std::uint64_t dma_requests = 0;
    std::uint64_t dma_bytes = 0;
    std::vector<std::uint64_t> tasklet_instructions;

    friend bool operator==(const KernelTimeline&, const KernelTimeline&) = default;
};

struct ScheduleOptions {
    bool timing = true;
    std::vector<std::uint32_t> semaphore_initial;
};

// Fluid event-driven model of one DPU.
// Pipeline: dispatch_interval issue slots, each giving one tasklet 1/dispatch_interval instruction per
// cycle. With more ready tasklets than slots, issue is shared round-robin: every ready tasklet holds
// an equal share. Bursts that began together pool their shares and spend them on the most remaining
// work first, tie groups sharing equally. Tasklets spinning on a mutex hold a plain share.
// DMA: one FIFO engine, blocking the issuing tasklet.
class Scheduler {
  public:
    Scheduler(const DpuConfig& cfg, unsigned tasklets, StepSource& source, ScheduleOptions options = {})
        : cfg_(cfg), n_(tasklets), source_(source), opt_(std::move(options)), ts_(tasklets) {
        check_tasklet_count(tasklets, cfg);
        timeline_.tasklet_instructions.assign(tasklets, 0);
    }

    KernelTimeline run() {
        for (unsigned t = 0; t < n_; ++t) ready_.push_back(t);
        while (true) {
            drain_ready();
            if (done_ == n_) break;
            std::vector<unsigned> workers, spinners;
            for (unsigned t = 0; t < n_; ++t) {
                if (ts_[t].phase == Phase::computing) workers.push_back(t);
                if (ts_[t].phase == Phase::spinning) spinners.push_back(t);
            }
            if (workers.empty() && events_.empty()) throw DeadlockError(describe_deadlock());
            if (workers.empty())
                spin_rate_ = spinners.size() <= cfg_.dispatch_interval ? 1.0 / cfg_.dispatch_interval
                                                                       : 1.0 / static_cast<double>(spinners.size());
            const double t_ext = events_.empty() ? kInf : events_.top().time;
            if (!workers.empty()) {
                const double dt = allocate(workers, spinners.size());
                if (now_ + dt <= t_ext) {
                    advance(dt, workers, spinners.size());
                    for (unsigned w : workers)
                        if (ts_[w].remaining <= kDoneEps * (1.0 + ts_[w].burst)) finish_burst(w);
                    continue;
                }
            }
            advance(t_ext - now_, workers, spinners.size());
            now_ = t_ext;
            while (!events_.empty() && events_.top().time <= now_) {
                const Event e = events_.top();
                events_.pop();
                wake(e.tasklet);
            }
        }
        return finalize();
    }

  private:
    enum class Phase { ready, computing, dma, blocked, spinning, done };

    struct TaskletState {
        Phase phase = Phase::ready;
        double remaining = 0;
        double burst = 0;
        double started = 0;
        double rate = 0;
        std::optional<Action> pending;
        double blocked_since = -1;
        std::uint32_t held_mutexes = 0;
    };

    struct Event {
        double time;
        std::uint64_t seq;
        unsigned tasklet;
        bool operator>(const Event& o) const { return time != o.time ? time > o.time : seq > o.seq; }
    };

    static constexpr double kInf = std::numeric_limits<double>::infinity();
    static constexpr double kDoneEps = 1e-9;

    static bool same_level(double a, double b) { return std::abs(a - b) <= 1e-9 * std::max(1.0, std::max(a, b)); }

    void drain_ready() {
        while (!ready_.empty()) {
            const unsigned t = ready_.front();
            ready_.pop_front();
            Step s = source_.next(t);
            timeline_.tasklet_instructions[t] += s.instructions;
            if (opt_.timing && s.instructions > 0) {
                auto& st = ts_[t];
                st.phase = Phase::computing;
                st.remaining = st.burst = static_cast<double>(s.instructions);
                st.started = now_;
                st.pending = std::move(s.action);
            } else {
                perform(t, s.action);
            }
        }
    }

    // Returns the time to the next internal event (burst completion or level merge).
    double allocate(std::vector<unsigned>& workers, std::size_t spinners) {
        const double cap = 1.0 / cfg_.dispatch_interval;
        const std::size_t k = workers.size() + spinners;
        const auto same_group = [&](unsigned a, unsigned b) {
            return same_level(ts_[a].started, ts_[b].started) && same_level(ts_[a].remaining, ts_[b].remaining);
        };
        std::sort(workers.begin(), workers.end(), [&](unsigned a, unsigned b) {
            if (!same_level(ts_[a].started, ts_[b].started)) return ts_[a].started < ts_[b].started;
            if (!same_level(ts_[a].remaining, ts_[b].remaining)) return ts_[a].remaining > ts_[b].remaining;
            return a < b;
        });
        if (k <= cfg_.dispatch_interval) {
            spin_rate_ = cap;
            for (unsigned w : workers) ts_[w].rate = cap;
        } else {
            spin_rate_ = 1.0 / static_cast<double>(k);
            for (std::size_t s = 0; s < workers.size();) {
                std::size_t e = s;
                while (e < workers.size() && same_level(ts_[workers[s]].started, ts_[workers[e]].started)) ++e;
                double pool = static_cast<double>(e - s) / static_cast<double>(k);
                for (std::size_t i = s; i < e;) {
                    std::size_t j = i;
                    while (j < e && same_group(workers[i], workers[j])) ++j;
                    const double g = static_cast<double>(j - i);
                    const double r = pool >= g * cap ? cap : pool / g;
                    pool = std::max(0.0, pool - r * g);
                    for (std::size_t x = i; x < j; ++x) ts_[workers[x]].rate = r;
                    i = j;
                }
                s = e;
            }
        }
        double dt = kInf;
        for (std::size_t i = 0; i < workers.size(); ++i) {
            const auto& a = ts_[workers[i]];
            if (a.rate > 0) dt = std::min(dt, a.remaining / a.rate);
            if (i + 1 < workers.size()) {
                const auto& b = ts_[workers[i + 1]];
                if (same_level(a.started, b.started) && !same_level(a.remaining, b.remaining) && a.rate > b.rate)
                    dt = std::min(dt, (a.remaining - b.remaining) / (a.rate - b.rate));
            }
        }
        return dt;
    }

    void advance(double dt, const std::vector<unsigned>& workers, std::size_t spinners) {
        if (dt <= 0 || dt == kInf) return;
        for (unsigned w : workers) ts_[w].remaining = std::max(0.0, ts_[w].remaining - ts_[w].rate * dt);
        spin_instructions_ += spin_rate_ * dt * static_cast<double>(spinners);
        now_ += dt;
    }

    void finish_burst(unsigned t) {
        auto& st = ts_[t];
        st.remaining = 0;
        st.rate = 0;
        st.phase = Phase::ready;
        perform(t, st.pending);
    }

    void resume_now(unsigned t) {
        ts_[t].phase = Phase::ready;
        ready_.push_back(t);
    }

    void resume_at(unsigned t, double delay) {
        if (!opt_.timing || delay <= 0) {
            end_stall(t);
            resume_now(t);
            return;
        }
        events_.push({now_ + delay, seq_++, t});
    }

    void wake(unsigned t) {
        end_stall(t);
        resume_now(t);
    }

    void block(unsigned t, Phase p) {
        ts_[t].phase = p;
        ts_[t].blocked_since = now_;
    }

    void end_stall(unsigned t) {
        auto& st = ts_[t];
        if (st.blocked_since >= 0) {
            stall_ += now_ - st.blocked_since;
            st.blocked_since = -1;
        }
    }

    void perform(unsigned t, const std::optional<Action>& action) {
        if (!action) {
            if (ts_[t].held_mutexes > 0)
                throw DeadlockError("tasklet " + std::to_string(t) + " ended while holding a mutex");
            ts_[t].phase = Phase::done;
            ++done_;
            return;
        }
        if (const auto* d = std::get_if<DmaEvent>(&*action)) {
            dma(t, *d);
            return;
        }
        const SyncEvent e = std::get<SyncEvent>(*action);
        switch (e.kind) {
            case SyncKind::barrier: barrier(t, e.object); break;
            case SyncKind::mutex_lock: lock(t, e.object); break;
            case SyncKind::mutex_unlock: unlock(t, e.object); break;
            case SyncKind::handshake_notify: notify(t); break;
            case SyncKind::handshake_wait: wait_for(t, e.object); break;
            case SyncKind::sem_give: sem_give(t, e.object); break;
            case SyncKind::sem_take: sem_take(t, e.object); break;
        }
    }

    void dma(unsigned t, const DmaEvent& d) {
        const DmaRequest req{d.direction, d.size, t};
        check_dma_size(d.size, cfg_);
        ++timeline_.dma_requests;
        timeline_.dma_bytes += d.size;
        if (!opt_.timing) {
            resume_now(t);
            return;
        }
        const bool queued = now_ < dma_free_;
        const double start = std::max(now_, dma_free_);
        const auto latency = static_cast<double>(queued ? dma_latency_queued(req, cfg_) : dma_latency(req, cfg_));
        dma_free_ = start + latency;
        dma_busy_ += latency;
        ts_[t].phase = Phase::dma;
        events_.push({dma_free_, seq_++, t});
    }

    template <class Map>
    static auto& slot(Map& m, std::uint32_t id) {
        if (m.size() <= id) m.resize(id + 1);
        return m[id];
    }

    void barrier(unsigned t, std::uint32_t id) {
        auto& waiting = slot(barriers_, id);
        waiting.push_back(t);
        block(t, Phase::blocked);
        if (waiting.size() < n_) return;
        const double cost = cfg_.sync.barrier_base_cycles + cfg_.sync.barrier_per_tasklet_cycles * n_;
        for (unsigned w : waiting) resume_at(w, cost);
        waiting.clear();
    }

    void lock(unsigned t, std::uint32_t id) {
        auto& m = slot(mutexes_, id);
        if (!m.owner) {
            m.owner = t;
            ++ts_[t].held_mutexes;
            resume_now(t);
            return;
        }
        m.waiters.push_back(t);
        block(t, Phase::spinning);
    }

    void unlock(unsigned t, std::uint32_t id) {
        auto& m = slot(mutexes_, id);
        if (m.owner != t)
            throw SyncError("tasklet " + std::to_string(t) + " unlocks mutex " + std::to_string(id) +
                            " it does not hold");
        --ts_[t].held_mutexes;
        m.owner.reset();
        resume_now(t);
        if (!m.waiters.empty()) {
            const unsigned w = m.waiters.front();
            m.waiters.pop_front();
            m.owner = w;
            ++ts_[w].held_mutexes;
            wake(w);
        }
    }

    // One token per notifier; a second notify blocks until the first is consumed.
    void notify(unsigned t) {
        auto& h = slot(handshakes_, t);
        if (h.waiter) {
            const unsigned w = *h.waiter;
            h.waiter.reset();
            resume_at(w, cfg_.sync.handshake_cycles);
            resume_now(t);
        } else if (!h.token) {
            h.token = true;
            resume_now(t);
        } else {
            h.notifier_blocked = true;
            block(t, Phase::blocked);
        }
    }

    void wait_for(unsigned t, std::uint32_t from) {
        if (from >= n_) throw SyncError("handshake with nonexistent tasklet " + std::to_string(from));
        auto& h = slot(handshakes_, from);
        if (h.waiter) throw SyncError("two tasklets wait for notifier " + std::to_string(from));
        block(t, Phase::blocked);
        if (!h.token) {
            h.waiter = t;
            return;
        }
        h.token = false;
        resume_at(t, cfg_.sync.handshake_cycles);
        if (h.notifier_blocked) {
            h.notifier_blocked = false;
            h.token = true;
            wake(from);
        }
    }

    std::uint32_t& sem_count(std::uint32_t id) {
        if (sems_.size() <= id) {
            const auto old = sems_.size();
            sems_.resize(id + 1);
            for (auto i = old; i <= id; ++i)
                sems_[i].count = i < opt_.semaphore_initial.size() ? opt_.semaphore_initial[i] : 0;
        }
        return sems_[id].count;
    }

    void sem_give(unsigned t, std::uint32_t id) {
        auto& count = sem_count(id);
        auto& s = sems_[id];
        block(t, Phase::blocked);
        resume_at(t, cfg_.sync.semaphore_cycles);
        if (!s.takers.empty()) {
            const unsigned w = s.takers.front();
            s.takers.pop_front();
            resume_at(w, cfg_.sync.semaphore_cycles);
        } else {
            ++count;
        }
    }

    void sem_take(unsigned t, std::uint32_t id) {
        auto& count = sem_count(id);
        block(t, Phase::blocked);
        if (count > 0) {
            --count;
            resume_at(t, cfg_.sync.semaphore_cycles);
        } else {
            sems_[id].takers.push_back(t);
        }
    }

    std::string describe_deadlock() const {
        std::ostringstream os;
        os << "deadlock at cycle " << static_cast<std::uint64_t>(now_) << ":";
        for (unsigned t = 0; t < n_; ++t) {
            if (ts_[t].phase == Phase::done) continue;
            os << " tasklet " << t << (ts_[t].phase == Phase::spinning ? " spins on a mutex;" : " is blocked;");
        }
        return os.str();
    }

    KernelTimeline finalize() {
        KernelTimeline& tl = timeline_;
        const double finish = std::ceil(now_ - 1e-6);
        tl.total_cycles = static_cast<std::uint64_t>(std::max(0.0, finish)) + cfg_.pipeline_depth;
        tl.pipeline_busy_cycles =
            pipeline_cycles(std::span<const std::uint64_t>(tl.tasklet_instructions), cfg_).cycles;
        if (!opt_.timing) tl.total_cycles = tl.pipeline_busy_cycles;
        for (auto n : tl.tasklet_instructions) tl.instructions += n;
        tl.dma_busy_cycles = static_cast<std::uint64_t>(std::llround(dma_busy_));
        tl.sync_stall_cycles = static_cast<std::uint64_t>(std::llround(stall_));
        tl.spin_instructions = static_cast<std::uint64_t>(std::llround(spin_instructions_));
        return tl;
    }

    struct Mutex {
        std::optional<unsigned> owner;
        std::deque<unsigned> waiters;
    };
    struct Handshake {
        bool token = false;
        bool notifier_blocked = false;
        std::optional<unsigned> waiter;
    };
    struct Semaphore {
        std::uint32_t count = 0;
        std::deque<unsigned> takers;
    };

    const DpuConfig& cfg_;
    unsigned n_;
    StepSource& source_;
    ScheduleOptions opt_;
    std::vector<TaskletState> ts_;
    std::deque<unsigned> ready_;
    std::priority_queue<Event, std::vector<Event>, std::greater<>> events_;
    std::uint64_t seq_ = 0;
    double now_ = 0;
    double dma_free_ = 0;
    double dma_busy_ = 0;
    double stall_ = 0;
    double spin_rate_ = 0;
    double spin_instructions_ = 0;
    unsigned done_ = 0;
    std::vector<std::vector<unsigned>> barriers_;
    std::vector<Mutex> mutexes_;
    std::vector<Handshake> handshakes_;
    std::vector<Semaphore> sems_;
    KernelTimeline timeline_;
};

class TraceSource : public StepSource {
  public:
    explicit TraceSource(const std::vector<TaskletTrace>& traces) : traces_(traces), pos_(traces.size(), 0) {}
    Step next(unsigned t) override {
        if (pos_[t] >= traces_[t].size()) return {};
        return traces_[t][pos_[t]++];
    }

  private:
    const std::vector<TaskletTrace>& traces_;
    std::vector<std::size_t> pos_;
};

inline KernelTimeline deterministic_schedule(const std::vector<TaskletTrace>& traces, const DpuConfig& cfg,
                                             ScheduleOptions options = {}) {
    TraceSource src(traces);
    return Scheduler(cfg, static_cast<unsigned>(traces.size()), src, std::move(options)).run();
}

}  // namespace pim::rt
