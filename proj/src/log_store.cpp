#include "griddisc/crc32c.hpp"
#include "griddisc/errors.hpp"
#include "griddisc/log.hpp"
#include "griddisc/store.hpp"
#include "griddisc/wire.hpp"
#include "griddisc/xdr.hpp"

#include <cerrno>
#include <cstring>
#include <fcntl.h>
#include <map>
#include <mutex>
#include <shared_mutex>
#include <unistd.h>

namespace griddisc {

namespace {

constexpr const char* kLogName = "registry.log";
constexpr const char* kTmpName = "registry.log.tmp";
constexpr std::size_t kMaxEntryPayload = 1 << 20;
// Entries before the garbage-ratio compaction check kicks in.
constexpr std::size_t kCompactMinEntries = 64;

[[noreturn]] void throw_errno(const std::string& what) {
    throw IoFailure(what + ": " + std::strerror(errno));
}

void put_be32(std::uint8_t* out, std::uint32_t v) {
    out[0] = static_cast<std::uint8_t>(v >> 24);
    out[1] = static_cast<std::uint8_t>(v >> 16);
    out[2] = static_cast<std::uint8_t>(v >> 8);
    out[3] = static_cast<std::uint8_t>(v);
}

std::uint32_t get_be32(const std::uint8_t* in) {
    return (std::uint32_t(in[0]) << 24) | (std::uint32_t(in[1]) << 16) |
           (std::uint32_t(in[2]) << 8) | std::uint32_t(in[3]);
}

struct LogFile {
    int fd = -1;

    LogFile() = default;
    explicit LogFile(int f) : fd(f) {}
    LogFile(const LogFile&) = delete;
    LogFile& operator=(const LogFile&) = delete;
    ~LogFile() {
        if (fd >= 0) ::close(fd);
    }
};

struct EntryRef {
    std::uint64_t offset = 0; // payload start
    std::uint32_t length = 0;
    std::uint32_t crc = 0;
};

// Append-only log of length-prefixed, CRC32C-checksummed entries. Each
// payload is XDR: op u32 (0 = put, 1 = erase), then the record encoding
// or (service_id string, stamp). The full index lives in memory; reads
// go back to the file so retrieval keeps a database-backed cost profile.
class LogStore final : public Store {
public:
    explicit LogStore(const std::filesystem::path& dir) : dir_(dir) {
        std::error_code ec;
        std::filesystem::create_directories(dir_, ec);
        if (ec) throw IoFailure("create " + dir_.string() + ": " + ec.message());
        log_path_ = dir_ / kLogName;
        tmp_path_ = dir_ / kTmpName;
        int fd = ::open(log_path_.c_str(), O_RDWR | O_CREAT | O_CLOEXEC, 0644);
        if (fd < 0) throw_errno("open " + log_path_.string());
        file_ = std::make_shared<LogFile>(fd);
        recover();
    }

    ~LogStore() override {
        std::unique_lock lock(mu_);
        close_locked(false);
    }

    void put(const ServiceRecord& record) override {
        XdrEncoder enc;
        enc.put_u32(static_cast<std::uint32_t>(WireOp::upsert));
        encode_record(enc, record);
        auto payload = enc.take();

        std::unique_lock lock(mu_);
        ensure_open();
        index_[record.service_id] = append_locked(payload);
        ++total_entries_;
        maybe_compact_locked();
    }

    std::optional<ServiceRecord> get(const Id128& id) const override {
        std::shared_ptr<LogFile> file;
        EntryRef ref;
        {
            std::shared_lock lock(mu_);
            ensure_open();
            auto it = index_.find(id);
            if (it == index_.end()) return std::nullopt;
            file = file_;
            ref = it->second;
        }
        return read_record(*file, ref);
    }

    bool erase(const Id128& id) override {
        std::unique_lock lock(mu_);
        ensure_open();
        auto it = index_.find(id);
        if (it == index_.end()) return false;
        // The erase entry reuses the delete-payload encoding, stamp included.
        ServiceRecord old = read_record(*file_, it->second);
        XdrEncoder enc;
        enc.put_u32(static_cast<std::uint32_t>(WireOp::del));
        enc.put_string(id.str());
        enc.put_u64(static_cast<std::uint64_t>(old.stamp.wall_micros));
        enc.put_raw(old.stamp.origin.bytes.data(), 16);
        append_locked(enc.take());
        index_.erase(it);
        ++total_entries_;
        maybe_compact_locked();
        return true;
    }

    std::vector<ServiceRecord> scan() const override {
        std::shared_ptr<LogFile> file;
        std::map<Id128, EntryRef> snapshot;
        {
            std::shared_lock lock(mu_);
            ensure_open();
            file = file_;
            snapshot = index_;
        }
        std::vector<ServiceRecord> out;
        out.reserve(snapshot.size());
        for (const auto& [_, ref] : snapshot) out.push_back(read_record(*file, ref));
        return out;
    }

    std::size_t size() const override {
        std::shared_lock lock(mu_);
        return index_.size();
    }

    void close() override {
        std::unique_lock lock(mu_);
        close_locked(true);
    }

    BackendDescriptor::Kind kind() const override { return BackendDescriptor::Kind::persistent; }

    RecoveryReport recovery() const override { return recovery_; }

private:
    void ensure_open() const {
        if (!file_) throw IoFailure("store is closed");
    }

    void close_locked(bool strict) {
        if (!file_) return;
        if (::fsync(file_->fd) < 0 && strict) throw_errno("fsync " + log_path_.string());
        file_.reset();
    }

    EntryRef append_locked(const std::vector<std::uint8_t>& payload) {
        std::vector<std::uint8_t> buf(8 + payload.size());
        put_be32(buf.data(), static_cast<std::uint32_t>(payload.size()));
        std::uint32_t crc = crc32c(payload.data(), payload.size());
        put_be32(buf.data() + 4, crc);
        std::memcpy(buf.data() + 8, payload.data(), payload.size());
        ssize_t n = ::pwrite(file_->fd, buf.data(), buf.size(), static_cast<off_t>(end_offset_));
        if (n != static_cast<ssize_t>(buf.size())) throw_errno("write " + log_path_.string());
        EntryRef ref{end_offset_ + 8, static_cast<std::uint32_t>(payload.size()), crc};
        end_offset_ += buf.size();
        return ref;
    }

    static std::vector<std::uint8_t> read_payload(const LogFile& file, const EntryRef& ref) {
        std::vector<std::uint8_t> buf(ref.length);
        ssize_t n = ::pread(file.fd, buf.data(), buf.size(), static_cast<off_t>(ref.offset));
        if (n != static_cast<ssize_t>(buf.size())) throw_errno("read log entry");
        if (crc32c(buf.data(), buf.size()) != ref.crc)
            throw CorruptStore("checksum mismatch at offset " + std::to_string(ref.offset));
        return buf;
    }

    static ServiceRecord read_record(const LogFile& file, const EntryRef& ref) {
        auto payload = read_payload(file, ref);
        XdrDecoder dec(payload.data(), payload.size());
        if (dec.get_u32() != static_cast<std::uint32_t>(WireOp::upsert))
            throw CorruptStore("index points at a non-record entry");
        ServiceRecord rec = decode_record(dec);
        dec.expect_end();
        return rec;
    }

    void recover() {
        off_t size = ::lseek(file_->fd, 0, SEEK_END);
        if (size < 0) throw_errno("seek " + log_path_.string());
        std::vector<std::uint8_t> data(static_cast<std::size_t>(size));
        if (size > 0) {
            ssize_t n = ::pread(file_->fd, data.data(), data.size(), 0);
            if (n != size) throw_errno("read " + log_path_.string());
        }

        std::uint64_t off = 0;
        bool corrupt = false;
        while (off + 8 <= data.size()) {
            std::uint32_t len = get_be32(data.data() + off);
            std::uint32_t crc = get_be32(data.data() + off + 4);
            if (len > kMaxEntryPayload || off + 8 + len > data.size()) break; // torn tail
            const std::uint8_t* payload = data.data() + off + 8;
            if (crc32c(payload, len) != crc) {
                corrupt = true;
                break;
            }
            try {
                XdrDecoder dec(payload, len);
                std::uint32_t op = dec.get_u32();
                if (op == static_cast<std::uint32_t>(WireOp::upsert)) {
                    ServiceRecord rec = decode_record(dec);
                    dec.expect_end();
                    index_[rec.service_id] = EntryRef{off + 8, len, crc};
                } else if (op == static_cast<std::uint32_t>(WireOp::del)) {
                    std::string id_text = dec.get_string();
                    auto id = Id128::parse(id_text);
                    if (!id) throw MalformedPayload("bad id in erase entry");
                    dec.get_u64();
                    Id128 origin;
                    dec.get_raw(origin.bytes.data(), 16);
                    dec.expect_end();
                    index_.erase(*id);
                } else {
                    throw MalformedPayload("unknown entry op");
                }
            } catch (const Error&) {
                corrupt = true;
                break;
            }
            off += 8 + len;
            ++total_entries_;
        }

        if (off < data.size()) {
            if (::ftruncate(file_->fd, static_cast<off_t>(off)) < 0)
                throw_errno("truncate " + log_path_.string());
            recovery_.truncated = true;
            GD_LOG_WARN("storage: ", log_path_.string(), corrupt ? ": corrupt entry" : ": torn tail",
                        " at offset ", off, ", truncated; recovered ", index_.size(), " records");
        }
        end_offset_ = off;
        recovery_.records_recovered = index_.size();
    }

    void maybe_compact_locked() {
        if (total_entries_ < kCompactMinEntries) return;
        if (index_.size() * 2 >= total_entries_) return; // garbage ratio <= 50%
        compact_locked();
    }

    void compact_locked() {
        int tmp_fd = ::open(tmp_path_.c_str(), O_RDWR | O_CREAT | O_TRUNC | O_CLOEXEC, 0644);
        if (tmp_fd < 0) throw_errno("open " + tmp_path_.string());
        auto tmp = std::make_shared<LogFile>(tmp_fd);

        std::map<Id128, EntryRef> new_index;
        std::vector<std::uint8_t> out;
        std::uint64_t off = 0;
        for (const auto& [id, ref] : index_) {
            auto payload = read_payload(*file_, ref);
            std::uint8_t header[8];
            put_be32(header, static_cast<std::uint32_t>(payload.size()));
            put_be32(header + 4, ref.crc);
            out.insert(out.end(), header, header + 8);
            out.insert(out.end(), payload.begin(), payload.end());
            new_index[id] = EntryRef{off + 8, ref.length, ref.crc};
            off += 8 + payload.size();
        }
        if (!out.empty()) {
            ssize_t n = ::pwrite(tmp_fd, out.data(), out.size(), 0);
            if (n != static_cast<ssize_t>(out.size())) throw_errno("write " + tmp_path_.string());
        }
        if (::fsync(tmp_fd) < 0) throw_errno("fsync " + tmp_path_.string());
        if (std::rename(tmp_path_.c_str(), log_path_.c_str()) != 0)
            throw_errno("rename " + tmp_path_.string());

        // The tmp fd survives the rename and becomes the live log file.
        file_ = tmp;
        index_ = std::move(new_index);
        total_entries_ = index_.size();
        end_offset_ = off;
        GD_LOG_DEBUG("storage: compacted ", log_path_.string(), " to ", index_.size(), " entries");
    }

    std::filesystem::path dir_, log_path_, tmp_path_;
    mutable std::shared_mutex mu_;
    std::shared_ptr<LogFile> file_;
    std::map<Id128, EntryRef> index_;
    std::uint64_t end_offset_ = 0;
    std::size_t total_entries_ = 0;
    RecoveryReport recovery_;
};

} // namespace

std::shared_ptr<Store> make_memory_store(std::optional<std::size_t> capacity);

std::shared_ptr<Store> open_store(const BackendDescriptor& descriptor) {
    if (descriptor.kind == BackendDescriptor::Kind::memory)
        return make_memory_store(descriptor.capacity_limit);
    if (descriptor.location.empty())
        throw IoFailure("persistent backend requires a location");
    return std::make_shared<LogStore>(descriptor.location);
}

} // namespace griddisc
