#pragma once

#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "socsim/memory.hpp"

namespace socsim {

inline constexpr std::string_view kDefaultMailboxName = "/dev/message_buffer_mailbox";
/// Each queued message is a linked-list node: 4-byte payload + 4-byte link.
inline constexpr std::uint32_t kMailboxNodeBytes = 8;

enum class PostResult { ok, full };
enum class MailboxCode { ok, empty };

struct GetResult {
    std::optional<std::uint32_t> message;
    MailboxCode error_code = MailboxCode::empty;

    bool operator==(const GetResult&) const = default;
};

struct MailboxStats {
    std::uint64_t posts = 0;
    std::uint64_t posts_accepted = 0;
    std::uint64_t full_rejections = 0;
    std::uint64_t gets = 0;
    std::uint64_t gets_successful = 0;
    std::uint64_t empty_rejections = 0;
    std::uint64_t acquire_failures = 0;

    bool operator==(const MailboxStats&) const = default;
};

struct MutexEvent {
    enum class Kind { acquire, release };
    std::uint64_t cycle = 0;
    CoreId core = 0;
    Kind kind = Kind::acquire;

    bool operator==(const MutexEvent&) const = default;
};

/// FIFO of 32-bit words guarded by a single-owner hardware mutex.
///
/// The queue may only be touched by the core holding the mutex. post() and
/// get() are the non-blocking driver calls: acquire, touch the queue, release.
class Mailbox {
public:
    Mailbox(std::string name, std::size_t capacity);

    bool try_acquire(CoreId core, std::uint64_t cycle = 0);
    /// Throws ContractViolation unless `core` owns the mutex.
    void release(CoreId core, std::uint64_t cycle = 0);

    /// Queue primitives; the caller must hold the mutex.
    PostResult enqueue(CoreId core, std::uint32_t message);
    GetResult dequeue(CoreId core);

    /// Throws ContractViolation if another core holds the mutex.
    PostResult post(CoreId core, std::uint32_t message, std::uint64_t cycle = 0);
    GetResult get(CoreId core, std::uint64_t cycle = 0);

    const std::string& name() const { return name_; }
    std::size_t capacity() const { return capacity_; }
    std::size_t size() const { return queue_.size(); }
    std::optional<CoreId> owner() const { return owner_; }
    const MailboxStats& stats() const { return stats_; }
    const std::vector<MutexEvent>& mutex_events() const { return events_; }
    const std::deque<std::uint32_t>& contents() const { return queue_; }

private:
    void require_owner(CoreId core, std::string_view what) const;

    std::string name_;
    std::size_t capacity_;
    std::deque<std::uint32_t> queue_;
    std::optional<CoreId> owner_;
    MailboxStats stats_;
    std::vector<MutexEvent> events_;
};

/// Mailboxes declared by the system configuration, looked up by device name.
class MailboxRegistry {
public:
    Mailbox& add(std::string name, std::size_t capacity);
    /// nullptr for an unregistered name; repeated opens share one mailbox.
    Mailbox* open(std::string_view name);

private:
    std::map<std::string, std::unique_ptr<Mailbox>, std::less<>> boxes_;
};

/// Capacity implied by a linked list living in the on-chip buffer.
std::size_t mailbox_capacity_for(std::uint32_t buffer_bytes);

/// True when acquire/release events strictly alternate per owner.
bool mutually_exclusive(const std::vector<MutexEvent>& events);

}  // namespace socsim
