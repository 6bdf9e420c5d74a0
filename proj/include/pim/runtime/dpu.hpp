#pragma once

#include <any>
#include <coroutine>
#include <cstddef>
#include <cstdint>
#include <cstring>
#include <functional>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pim/core/config.hpp"
#include "pim/runtime/scheduler.hpp"
#include "pim/runtime/task.hpp"

namespace pim::rt {

class Dpu;
class Tasklet;

struct LaunchOptions {
    bool timing = true;
    bool record_traces = false;
};

using Kernel = std::function<Task(Tasklet&)>;

// Kernel-side view of one tasklet: cost accounting, WRAM, DMA and synchronization.
class Tasklet {
  public:
    Tasklet(Dpu& dpu, unsigned id, unsigned count) : dpu_(&dpu), id_(id), count_(count) {}

    unsigned id() const { return id_; }
    unsigned count() const { return count_; }
    inline const DpuConfig& config() const;
    const InstructionMix& mix() const { return mix_; }

    inline void charge(OpClass op, DataType dt, std::uint64_t count = 1);
    void wram_load(std::uint64_t n = 1) { charge(OpClass::wram_load, DataType::int64, n); }
    void wram_store(std::uint64_t n = 1) { charge(OpClass::wram_store, DataType::int64, n); }
    void loop(std::uint64_t iterations = 1) {
        charge(OpClass::address_calc, DataType::int32, iterations);
        charge(OpClass::add, DataType::int32, iterations);
        charge(OpClass::branch, DataType::int32, iterations);
    }

    template <class T>
    std::span<T> wram_alloc(std::size_t n);
    // One buffer per key shared by all tasklets of the launch.
    template <class T>
    std::span<T> shared(const std::string& key, std::size_t n);
    template <class A>
    const A& args() const;

    struct DmaAwaitable {
        Tasklet* t;
        DmaDirection direction;
        std::uint64_t mram;
        std::byte* wram;
        std::uint32_t size;
        bool await_ready() const noexcept { return false; }
        void await_suspend(std::coroutine_handle<> h) { t->yield(h, DmaEvent{direction, size}); }
        inline void await_resume() const;
    };

    struct SyncAwaitable {
        Tasklet* t;
        SyncEvent event;
        bool await_ready() const noexcept { return false; }
        void await_suspend(std::coroutine_handle<> h) { t->yield(h, event); }
        void await_resume() const noexcept {}
    };

    inline DmaAwaitable mram_read(std::uint64_t mram_addr, void* wram_dst, std::uint32_t size);
    inline DmaAwaitable mram_write(const void* wram_src, std::uint64_t mram_addr, std::uint32_t size);

    SyncAwaitable barrier_wait(std::uint32_t id = 0) {
        charge(OpClass::move, DataType::int32);
        return {this, {SyncKind::barrier, id}};
    }
    SyncAwaitable mutex_lock(std::uint32_t id = 0) {
        charge_raw(config().sync.mutex_lock_instructions);
        return {this, {SyncKind::mutex_lock, id}};
    }
    SyncAwaitable mutex_unlock(std::uint32_t id = 0) {
        charge_raw(config().sync.mutex_unlock_instructions);
        return {this, {SyncKind::mutex_unlock, id}};
    }
    SyncAwaitable handshake_notify() {
        charge(OpClass::move, DataType::int32);
        return {this, {SyncKind::handshake_notify, id_}};
    }
    SyncAwaitable handshake_wait_for(unsigned notifier) {
        charge(OpClass::move, DataType::int32);
        return {this, {SyncKind::handshake_wait, notifier}};
    }
    SyncAwaitable sem_give(std::uint32_t id = 0) {
        charge(OpClass::move, DataType::int32);
        return {this, {SyncKind::sem_give, id}};
    }
    SyncAwaitable sem_take(std::uint32_t id = 0) {
        charge(OpClass::move, DataType::int32);
        return {this, {SyncKind::sem_take, id}};
    }

  private:
    friend class Dpu;
    friend class KernelSource;

    void charge_raw(std::uint64_t n) { pending_instructions_ += n; }
    void yield(std::coroutine_handle<> h, Action a) {
        resume_point_ = h;
        pending_action_ = a;
    }
    inline DmaAwaitable dma(DmaDirection d, std::uint64_t mram_addr, const void* wram, std::uint32_t size);

    Dpu* dpu_;
    unsigned id_;
    unsigned count_;
    InstructionMix mix_;
    std::uint64_t pending_instructions_ = 0;
    std::optional<Action> pending_action_;
    std::coroutine_handle<> resume_point_;
};

class Dpu {
  public:
    explicit Dpu(const DpuConfig& cfg) : cfg_(&cfg), wram_(cfg.wram_bytes) {}

    const DpuConfig& config() const { return *cfg_; }

    void copy_to_mram(std::uint64_t addr, std::span<const std::byte> bytes) {
        check_mram(addr, bytes.size());
        if (bytes.empty()) return;
        grow(addr + bytes.size());
        std::memcpy(mram_.data() + addr, bytes.data(), bytes.size());
    }

    void copy_from_mram(std::uint64_t addr, std::span<std::byte> out) const {
        check_mram(addr, out.size());
        std::fill(out.begin(), out.end(), std::byte{0});
        if (addr >= mram_.size()) return;
        const std::size_t n = std::min<std::size_t>(out.size(), mram_.size() - addr);
        std::memcpy(out.data(), mram_.data() + addr, n);
    }

    template <class T>
    void write(std::uint64_t addr, std::span<const T> values) {
        copy_to_mram(addr, std::as_bytes(values));
    }

    template <class T>
    std::vector<T> read(std::uint64_t addr, std::size_t n) const {
        std::vector<T> v(n);
        copy_from_mram(addr, std::as_writable_bytes(std::span<T>(v)));
        return v;
    }

    template <class A>
    void set_args(A a) {
        args_ = std::move(a);
    }
    const std::any& args() const { return args_; }

    void set_semaphores(std::vector<std::uint32_t> initial) { semaphores_ = std::move(initial); }

    inline KernelTimeline launch(const Kernel& kernel, unsigned tasklets, LaunchOptions options = {});

    const std::vector<TaskletTrace>& traces() const { return traces_; }
    std::span<const std::byte> wram() const { return wram_; }
    std::uint64_t wram_used() const { return heap_top_; }
    std::uint64_t mram_footprint() const { return mram_.size(); }

  private:
    friend class Tasklet;
    friend class KernelSource;

    void check_mram(std::uint64_t addr, std::uint64_t size) const {
        if (addr + size > cfg_->mram_bytes)
            throw CapacityError("MRAM overflow: [" + std::to_string(addr) + ", " + std::to_string(addr + size) +
                                ") exceeds " + std::to_string(cfg_->mram_bytes) + " bytes");
    }

    void grow(std::uint64_t end) {
        if (mram_.size() < end) mram_.resize(end);
    }

    std::byte* allocate(std::size_t bytes) {
        const std::uint64_t rounded = (bytes + 7) / 8 * 8;
        if (heap_top_ + rounded > wram_.size())
            throw CapacityError("WRAM overflow: " + std::to_string(heap_top_ + rounded) + " bytes needed, " +
                                std::to_string(wram_.size()) + " available");
        std::byte* p = wram_.data() + heap_top_;
        heap_top_ += rounded;
        return p;
    }

    std::byte* shared_buffer(const std::string& key, std::size_t bytes) {
        auto it = shared_.find(key);
        if (it == shared_.end()) {
            std::byte* p = allocate(bytes);
            shared_.emplace(key, std::make_pair(static_cast<std::size_t>(p - wram_.data()), bytes));
            return p;
        }
        if (it->second.second != bytes)
            throw std::invalid_argument("shared WRAM buffer '" + key + "' requested with a different size");
        return wram_.data() + it->second.first;
    }

    void dma_copy(DmaDirection d, std::uint64_t mram_addr, std::byte* wram, std::uint32_t size) {
        if (d == DmaDirection::mram_to_wram) {
            copy_from_mram(mram_addr, {wram, size});
        } else {
            copy_to_mram(mram_addr, {wram, size});
        }
    }

    const DpuConfig* cfg_;
    std::vector<std::byte> mram_;
    std::vector<std::byte> wram_;
    std::uint64_t heap_top_ = 0;
    std::map<std::string, std::pair<std::size_t, std::size_t>> shared_;
    std::any args_;
    std::vector<std::uint32_t> semaphores_;
    std::vector<TaskletTrace> traces_;
};

inline const DpuConfig& Tasklet::config() const { return dpu_->config(); }

inline void Tasklet::charge(OpClass op, DataType dt, std::uint64_t count) {
    mix_.add(op, dt, count);
    pending_instructions_ += count * config().costs(op, dt);
}

template <class T>
std::span<T> Tasklet::wram_alloc(std::size_t n) {
    return {reinterpret_cast<T*>(dpu_->allocate(n * sizeof(T))), n};
}

template <class T>
std::span<T> Tasklet::shared(const std::string& key, std::size_t n) {
    return {reinterpret_cast<T*>(dpu_->shared_buffer(key, n * sizeof(T))), n};
}

template <class A>
const A& Tasklet::args() const {
    return std::any_cast<const A&>(dpu_->args_);
}

inline Tasklet::DmaAwaitable Tasklet::dma(DmaDirection d, std::uint64_t mram_addr, const void* wram,
                                          std::uint32_t size) {
    const DpuConfig& cfg = config();
    check_dma_size(size, cfg);
    if (mram_addr % cfg.dma_granularity != 0)
        throw DmaError("MRAM address " + std::to_string(mram_addr) + " is not " +
                       std::to_string(cfg.dma_granularity) + "-byte aligned");
    auto* p = static_cast<const std::byte*>(wram);
    const std::byte* base = dpu_->wram_.data();
    if (p < base || p + size > base + dpu_->wram_.size())
        throw DmaError("DMA buffer lies outside WRAM");
    if ((p - base) % cfg.dma_granularity != 0) throw DmaError("WRAM buffer is not aligned");
    dpu_->check_mram(mram_addr, size);
    charge(OpClass::address_calc, DataType::int32);
    charge_raw(cfg.dma_issue_instructions > 0 ? cfg.dma_issue_instructions - 1 : 0);
    return {this, d, mram_addr, const_cast<std::byte*>(p), size};
}

inline Tasklet::DmaAwaitable Tasklet::mram_read(std::uint64_t mram_addr, void* wram_dst, std::uint32_t size) {
    return dma(DmaDirection::mram_to_wram, mram_addr, wram_dst, size);
}

inline Tasklet::DmaAwaitable Tasklet::mram_write(const void* wram_src, std::uint64_t mram_addr,
                                                 std::uint32_t size) {
    return dma(DmaDirection::wram_to_mram, mram_addr, wram_src, size);
}

inline void Tasklet::DmaAwaitable::await_resume() const { t->dpu_->dma_copy(direction, mram, wram, size); }

class KernelSource : public StepSource {
  public:
    KernelSource(Dpu& dpu, const Kernel& kernel, unsigned n, bool record) : record_(record) {
        tasklets_.reserve(n);
        for (unsigned i = 0; i < n; ++i) tasklets_.emplace_back(dpu, i, n);
        tasks_.reserve(n);
        for (unsigned i = 0; i < n; ++i) tasks_.push_back(kernel(tasklets_[i]));
        if (record_) traces_.assign(n, {});
    }

    Step next(unsigned i) override {
        Tasklet& t = tasklets_[i];
        Task& task = tasks_[i];
        t.pending_instructions_ = 0;
        t.pending_action_.reset();
        std::coroutine_handle<> h = t.resume_point_ ? t.resume_point_ : task.handle();
        t.resume_point_ = {};
        h.resume();
        Step s{t.pending_instructions_, {}};
        if (task.done()) {
            task.rethrow_if_failed();
        } else {
            s.action = t.pending_action_;
        }
        if (record_) traces_[i].push_back(s);
        return s;
    }

    std::vector<TaskletTrace> take_traces() { return std::move(traces_); }

  private:
    bool record_;
    std::vector<Tasklet> tasklets_;
    std::vector<Task> tasks_;
    std::vector<TaskletTrace> traces_;
};

inline KernelTimeline Dpu::launch(const Kernel& kernel, unsigned tasklets, LaunchOptions options) {
    check_tasklet_count(tasklets, *cfg_);
    std::fill(wram_.begin(), wram_.end(), std::byte{0});
    shared_.clear();
    heap_top_ = 0;
    const std::uint64_t stacks = tasklets * cfg_->wram_stack_bytes;
    if (stacks > wram_.size())
        throw CapacityError("WRAM overflow: " + std::to_string(tasklets) + " tasklet stacks need " +
                            std::to_string(stacks) + " bytes");
    heap_top_ = stacks;
    KernelSource source(*this, kernel, tasklets, options.record_traces);
    ScheduleOptions so;
    so.timing = options.timing;
    so.semaphore_initial = semaphores_;
    KernelTimeline tl = Scheduler(*cfg_, tasklets, source, so).run();
    traces_ = source.take_traces();
    return tl;
}

}  // namespace pim::rt
