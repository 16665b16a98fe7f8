#include "socsim/mailbox.hpp"

#include <fmt/format.h>

#include "socsim/errors.hpp"

namespace socsim {

Mailbox::Mailbox(std::string name, std::size_t capacity) : name_(std::move(name)), capacity_(capacity) {}

bool Mailbox::try_acquire(CoreId core, std::uint64_t cycle) {
    if (owner_) {
        ++stats_.acquire_failures;
        return false;
    }
    owner_ = core;
    events_.push_back({cycle, core, MutexEvent::Kind::acquire});
    return true;
}

void Mailbox::release(CoreId core, std::uint64_t cycle) {
    require_owner(core, "release");
    owner_.reset();
    events_.push_back({cycle, core, MutexEvent::Kind::release});
}

void Mailbox::require_owner(CoreId core, std::string_view what) const {
    if (owner_ != core) {
        throw ContractViolation(fmt::format("core {} attempted {} on mailbox '{}' without its mutex",
                                            core, what, name_));
    }
}

PostResult Mailbox::enqueue(CoreId core, std::uint32_t message) {
    require_owner(core, "post");
    ++stats_.posts;
    if (queue_.size() >= capacity_) {
        ++stats_.full_rejections;
        return PostResult::full;
    }
    queue_.push_back(message);
    ++stats_.posts_accepted;
    return PostResult::ok;
}

GetResult Mailbox::dequeue(CoreId core) {
    require_owner(core, "get");
    ++stats_.gets;
    if (queue_.empty()) {
        ++stats_.empty_rejections;
        return {std::nullopt, MailboxCode::empty};
    }
    const std::uint32_t msg = queue_.front();
    queue_.pop_front();
    ++stats_.gets_successful;
    return {msg, MailboxCode::ok};
}

PostResult Mailbox::post(CoreId core, std::uint32_t message, std::uint64_t cycle) {
    if (!try_acquire(core, cycle)) {
        throw ContractViolation(fmt::format("mailbox '{}' mutex is held by core {}", name_, *owner_));
    }
    const PostResult r = enqueue(core, message);
    release(core, cycle);
    return r;
}

GetResult Mailbox::get(CoreId core, std::uint64_t cycle) {
    if (!try_acquire(core, cycle)) {
        throw ContractViolation(fmt::format("mailbox '{}' mutex is held by core {}", name_, *owner_));
    }
    const GetResult r = dequeue(core);
    release(core, cycle);
    return r;
}

Mailbox& MailboxRegistry::add(std::string name, std::size_t capacity) {
    auto box = std::make_unique<Mailbox>(name, capacity);
    auto& slot = boxes_[std::move(name)];
    slot = std::move(box);
    return *slot;
}

Mailbox* MailboxRegistry::open(std::string_view name) {
    auto it = boxes_.find(name);
    return it == boxes_.end() ? nullptr : it->second.get();
}

std::size_t mailbox_capacity_for(std::uint32_t buffer_bytes) { return buffer_bytes / kMailboxNodeBytes; }

bool mutually_exclusive(const std::vector<MutexEvent>& events) {
    std::optional<CoreId> holder;
    std::uint64_t last_cycle = 0;
    for (const auto& e : events) {
        if (e.cycle < last_cycle) return false;
        last_cycle = e.cycle;
        if (e.kind == MutexEvent::Kind::acquire) {
            if (holder) return false;
            holder = e.core;
        } else {
            if (holder != e.core) return false;
            holder.reset();
        }
    }
    return true;
}

}  // namespace socsim
