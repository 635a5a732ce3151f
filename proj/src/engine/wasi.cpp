#include <fcntl.h>
#include <sys/stat.h>
#include <sys/uio.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <ctime>
#include <random>
#include <thread>
#include <unordered_map>

#include "wasmless/engine/instance.hpp"
#include "wasmless/engine/wasi.hpp"

namespace wasmless::engine {

namespace {

// WASI preview1 errno values (subset we produce).
enum WasiErrno : uint32_t {
    w_success = 0,
    w_acces = 2,
    w_badf = 8,
    w_exist = 20,
    w_fault = 21,
    w_inval = 28,
    w_io = 29,
    w_isdir = 31,
    w_loop = 32,
    w_nametoolong = 37,
    w_noent = 44,
    w_nomem = 48,
    w_nospc = 51,
    w_notdir = 54,
    w_notsup = 58,
    w_perm = 63,
    w_spipe = 70,
    w_notcapable = 76,
};

uint32_t errno_to_wasi(int e) {
    switch (e) {
        case EACCES: return w_acces;
        case EBADF: return w_badf;
        case EEXIST: return w_exist;
        case EFAULT: return w_fault;
        case EINVAL: return w_inval;
        case EISDIR: return w_isdir;
        case ELOOP: return w_loop;
        case ENAMETOOLONG: return w_nametoolong;
        case ENOENT: return w_noent;
        case ENOMEM: return w_nomem;
        case ENOSPC: return w_nospc;
        case ENOTDIR: return w_notdir;
        case EPERM: return w_perm;
        case ESPIPE: return w_spipe;
        default: return w_io;
    }
}

// WASI filetype values.
enum WasiFiletype : uint8_t {
    ft_unknown = 0,
    ft_char_device = 2,
    ft_directory = 3,
    ft_regular = 4,
    ft_symlink = 7,
};

uint8_t mode_to_filetype(mode_t m) {
    if (S_ISDIR(m)) return ft_directory;
    if (S_ISREG(m)) return ft_regular;
    if (S_ISCHR(m)) return ft_char_device;
    if (S_ISLNK(m)) return ft_symlink;
    return ft_unknown;
}

struct W32 {  // little-endian writers into guest memory
    static void u8(uint8_t* p, uint8_t v) { p[0] = v; }
    static void u16(uint8_t* p, uint16_t v) { std::memcpy(p, &v, 2); }
    static void u32(uint8_t* p, uint32_t v) { std::memcpy(p, &v, 4); }
    static void u64(uint8_t* p, uint64_t v) { std::memcpy(p, &v, 8); }
};

// Lexically normalize a guest-relative path; rejects escapes above the
// preopen root. Returns false on `..` underflow or absolute input.
bool normalize(const std::string& path, std::vector<std::string>& out) {
    if (!path.empty() && path[0] == '/') return false;
    size_t i = 0;
    while (i < path.size()) {
        size_t j = path.find('/', i);
        if (j == std::string::npos) j = path.size();
        std::string comp = path.substr(i, j - i);
        i = j + 1;
        if (comp.empty() || comp == ".") continue;
        if (comp == "..") {
            if (out.empty()) return false;
            out.pop_back();
            continue;
        }
        out.push_back(std::move(comp));
    }
    return true;
}

struct ScopedFd {
    int fd = -1;
    ScopedFd() = default;
    explicit ScopedFd(int f) : fd(f) {}
    ScopedFd(const ScopedFd&) = delete;
    ScopedFd(ScopedFd&& o) noexcept : fd(o.fd) { o.fd = -1; }
    ScopedFd& operator=(ScopedFd&& o) noexcept {
        if (fd >= 0) ::close(fd);
        fd = o.fd;
        o.fd = -1;
        return *this;
    }
    ~ScopedFd() {
        if (fd >= 0) ::close(fd);
    }
    int release() {
        int f = fd;
        fd = -1;
        return f;
    }
};

// Walk components under `root` with O_NOFOLLOW at every step so symlinks
// cannot escape the preopen. Returns the parent directory fd and leaves the
// final component in `leaf`.
uint32_t walk_parent(int root, const std::vector<std::string>& comps, ScopedFd& parent, std::string& leaf) {
    int cur = ::dup(root);
    if (cur < 0) return errno_to_wasi(errno);
    ScopedFd hold(cur);
    if (comps.empty()) {
        leaf = ".";
        parent = std::move(hold);
        return w_success;
    }
    for (size_t i = 0; i + 1 < comps.size(); ++i) {
        int next = ::openat(hold.fd, comps[i].c_str(), O_RDONLY | O_DIRECTORY | O_NOFOLLOW | O_CLOEXEC);
        if (next < 0) return errno_to_wasi(errno);
        hold = ScopedFd(next);
    }
    leaf = comps.back();
    parent = std::move(hold);
    return w_success;
}

// --- host function bodies ---------------------------------------------------

WasiContext::FdEntry* fd_entry(Instance& inst, uint64_t fd) {
    auto& fds = inst.wasi().fds;
    if (fd >= fds.size() || fds[fd].kind == WasiContext::FdEntry::empty) return nullptr;
    return &fds[fd];
}

uint32_t wasi_args_sizes_get(Instance& inst, const uint64_t* a) {
    uint8_t* argc_p = inst.mem(static_cast<uint32_t>(a[0]), 4);
    uint8_t* size_p = inst.mem(static_cast<uint32_t>(a[1]), 4);
    if (!argc_p || !size_p) return w_fault;
    uint32_t bytes = 0;
    for (const auto& s : inst.wasi().cfg.argv) bytes += static_cast<uint32_t>(s.size()) + 1;
    W32::u32(argc_p, static_cast<uint32_t>(inst.wasi().cfg.argv.size()));
    W32::u32(size_p, bytes);
    return w_success;
}

uint32_t wasi_args_get(Instance& inst, const uint64_t* a) {
    uint32_t argv_ptr = static_cast<uint32_t>(a[0]);
    uint32_t buf_ptr = static_cast<uint32_t>(a[1]);
    const auto& argv = inst.wasi().cfg.argv;
    uint8_t* table = inst.mem(argv_ptr, static_cast<uint32_t>(argv.size()) * 4);
    if (!table) return w_fault;
    uint32_t cursor = buf_ptr;
    for (size_t i = 0; i < argv.size(); ++i) {
        uint8_t* dst = inst.mem(cursor, static_cast<uint32_t>(argv[i].size()) + 1);
        if (!dst) return w_fault;
        std::memcpy(dst, argv[i].c_str(), argv[i].size() + 1);
        W32::u32(table + i * 4, cursor);
        cursor += static_cast<uint32_t>(argv[i].size()) + 1;
    }
    return w_success;
}

uint32_t wasi_environ_sizes_get(Instance& inst, const uint64_t* a) {
    uint8_t* count_p = inst.mem(static_cast<uint32_t>(a[0]), 4);
    uint8_t* size_p = inst.mem(static_cast<uint32_t>(a[1]), 4);
    if (!count_p || !size_p) return w_fault;
    uint32_t bytes = 0;
    for (const auto& [k, v] : inst.wasi().cfg.env) bytes += static_cast<uint32_t>(k.size() + v.size()) + 2;
    W32::u32(count_p, static_cast<uint32_t>(inst.wasi().cfg.env.size()));
    W32::u32(size_p, bytes);
    return w_success;
}

uint32_t wasi_environ_get(Instance& inst, const uint64_t* a) {
    uint32_t env_ptr = static_cast<uint32_t>(a[0]);
    uint32_t buf_ptr = static_cast<uint32_t>(a[1]);
    const auto& env = inst.wasi().cfg.env;
    uint8_t* table = inst.mem(env_ptr, static_cast<uint32_t>(env.size()) * 4);
    if (!table) return w_fault;
    uint32_t cursor = buf_ptr;
    for (size_t i = 0; i < env.size(); ++i) {
        std::string kv = env[i].first + "=" + env[i].second;
        uint8_t* dst = inst.mem(cursor, static_cast<uint32_t>(kv.size()) + 1);
        if (!dst) return w_fault;
        std::memcpy(dst, kv.c_str(), kv.size() + 1);
        W32::u32(table + i * 4, cursor);
        cursor += static_cast<uint32_t>(kv.size()) + 1;
    }
    return w_success;
}

uint32_t wasi_clock_res_get(Instance& inst, const uint64_t* a) {
    uint8_t* p = inst.mem(static_cast<uint32_t>(a[1]), 8);
    if (!p) return w_fault;
    W32::u64(p, 1);  // 1ns resolution
    return w_success;
}

uint32_t wasi_clock_time_get(Instance& inst, const uint64_t* a) {
    clockid_t id;
    switch (static_cast<uint32_t>(a[0])) {
        case 0: id = CLOCK_REALTIME; break;
        case 1: id = CLOCK_MONOTONIC; break;
        case 2: id = CLOCK_PROCESS_CPUTIME_ID; break;
        case 3: id = CLOCK_THREAD_CPUTIME_ID; break;
        default: return w_inval;
    }
    uint8_t* p = inst.mem(static_cast<uint32_t>(a[2]), 8);
    if (!p) return w_fault;
    timespec ts;
    clock_gettime(id, &ts);
    W32::u64(p, static_cast<uint64_t>(ts.tv_sec) * 1'000'000'000ull + ts.tv_nsec);
    return w_success;
}

uint32_t wasi_fd_close(Instance& inst, const uint64_t* a) {
    auto* e = fd_entry(inst, a[0]);
    if (!e) return w_badf;
    if (e->kind == WasiContext::FdEntry::file || e->kind == WasiContext::FdEntry::dir) {
        ::close(e->host_fd);
    }
    e->kind = WasiContext::FdEntry::empty;
    e->host_fd = -1;
    return w_success;
}

uint32_t wasi_fd_fdstat_get(Instance& inst, const uint64_t* a) {
    auto* e = fd_entry(inst, a[0]);
    if (!e) return w_badf;
    uint8_t* p = inst.mem(static_cast<uint32_t>(a[1]), 24);
    if (!p) return w_fault;
    std::memset(p, 0, 24);
    uint8_t ft = ft_char_device;
    if (e->kind == WasiContext::FdEntry::dir) ft = ft_directory;
    if (e->kind == WasiContext::FdEntry::file) {
        struct stat st{};
        if (fstat(e->host_fd, &st) == 0) ft = mode_to_filetype(st.st_mode);
    }
    W32::u8(p, ft);
    W32::u64(p + 8, ~0ull);   // rights_base: capability scoping happens at preopen level
    W32::u64(p + 16, ~0ull);  // rights_inheriting
    return w_success;
}

uint32_t wasi_fd_fdstat_set_flags(Instance&, const uint64_t*) { return w_notsup; }

void fill_filestat(uint8_t* p, const struct stat& st) {
    std::memset(p, 0, 64);
    W32::u64(p, static_cast<uint64_t>(st.st_dev));
    W32::u64(p + 8, static_cast<uint64_t>(st.st_ino));
    W32::u8(p + 16, mode_to_filetype(st.st_mode));
    W32::u64(p + 24, static_cast<uint64_t>(st.st_nlink));
    W32::u64(p + 32, static_cast<uint64_t>(st.st_size));
    W32::u64(p + 40, static_cast<uint64_t>(st.st_atime) * 1'000'000'000ull);
    W32::u64(p + 48, static_cast<uint64_t>(st.st_mtime) * 1'000'000'000ull);
    W32::u64(p + 56, static_cast<uint64_t>(st.st_ctime) * 1'000'000'000ull);
}

uint32_t wasi_fd_filestat_get(Instance& inst, const uint64_t* a) {
    auto* e = fd_entry(inst, a[0]);
    if (!e) return w_badf;
    uint8_t* p = inst.mem(static_cast<uint32_t>(a[1]), 64);
    if (!p) return w_fault;
    if (e->kind == WasiContext::FdEntry::file || e->kind == WasiContext::FdEntry::dir) {
        struct stat st{};
        if (fstat(e->host_fd, &st) != 0) return errno_to_wasi(errno);
        fill_filestat(p, st);
        return w_success;
    }
    std::memset(p, 0, 64);
    W32::u8(p + 16, ft_char_device);
    if (e->kind == WasiContext::FdEntry::stdin_k) {
        W32::u64(p + 32, inst.wasi().cfg.stdin_bytes.size());
    }
    return w_success;
}

uint32_t wasi_fd_prestat_get(Instance& inst, const uint64_t* a) {
    auto* e = fd_entry(inst, a[0]);
    if (!e || e->kind != WasiContext::FdEntry::dir) return w_badf;
    uint8_t* p = inst.mem(static_cast<uint32_t>(a[1]), 8);
    if (!p) return w_fault;
    const std::string& name = inst.wasi().cfg.preopens[e->preopen].guest_path;
    W32::u32(p, 0);  // preopen type: directory
    W32::u32(p + 4, static_cast<uint32_t>(name.size()));
    return w_success;
}

uint32_t wasi_fd_prestat_dir_name(Instance& inst, const uint64_t* a) {
    auto* e = fd_entry(inst, a[0]);
    if (!e || e->kind != WasiContext::FdEntry::dir) return w_badf;
    const std::string& name = inst.wasi().cfg.preopens[e->preopen].guest_path;
    uint32_t len = static_cast<uint32_t>(a[2]);
    if (len > name.size()) len = static_cast<uint32_t>(name.size());
    uint8_t* p = inst.mem(static_cast<uint32_t>(a[1]), len);
    if (!p) return w_fault;
    std::memcpy(p, name.data(), len);
    return w_success;
}

constexpr uint32_t kMaxIovs = 1024;

uint32_t wasi_fd_read(Instance& inst, const uint64_t* a) {
    auto* e = fd_entry(inst, a[0]);
    if (!e) return w_badf;
    uint32_t iovs = static_cast<uint32_t>(a[1]);
    uint32_t niovs = static_cast<uint32_t>(a[2]);
    if (niovs > kMaxIovs) return w_inval;
    uint8_t* ret_p = inst.mem(static_cast<uint32_t>(a[3]), 4);
    uint8_t* iov_p = inst.mem(iovs, niovs * 8);
    if (!ret_p || !iov_p) return w_fault;

    uint64_t total = 0;
    for (uint32_t i = 0; i < niovs; ++i) {
        uint32_t buf, len;
        std::memcpy(&buf, iov_p + i * 8, 4);
        std::memcpy(&len, iov_p + i * 8 + 4, 4);
        uint8_t* dst = inst.mem(buf, len);
        if (!dst) return w_fault;
        if (len == 0) continue;
        ssize_t n = 0;
        switch (e->kind) {
            case WasiContext::FdEntry::stdin_k: {
                const Bytes& in = inst.wasi().cfg.stdin_bytes;
                size_t avail = in.size() - inst.wasi().stdin_pos;
                n = static_cast<ssize_t>(std::min<size_t>(len, avail));
                std::memcpy(dst, in.data() + inst.wasi().stdin_pos, n);
                inst.wasi().stdin_pos += n;
                break;
            }
            case WasiContext::FdEntry::file:
                n = ::read(e->host_fd, dst, len);
                if (n < 0) return errno_to_wasi(errno);
                break;
            case WasiContext::FdEntry::dir:
                return w_isdir;
            default:
                return w_badf;
        }
        total += static_cast<uint64_t>(n);
        if (static_cast<uint32_t>(n) < len) break;  // EOF / short read
    }
    W32::u32(ret_p, static_cast<uint32_t>(total));
    return w_success;
}

uint32_t wasi_fd_write(Instance& inst, const uint64_t* a) {
    auto* e = fd_entry(inst, a[0]);
    if (!e) return w_badf;
    uint32_t iovs = static_cast<uint32_t>(a[1]);
    uint32_t niovs = static_cast<uint32_t>(a[2]);
    if (niovs > kMaxIovs) return w_inval;
    uint8_t* ret_p = inst.mem(static_cast<uint32_t>(a[3]), 4);
    uint8_t* iov_p = inst.mem(iovs, niovs * 8);
    if (!ret_p || !iov_p) return w_fault;

    uint64_t total = 0;
    for (uint32_t i = 0; i < niovs; ++i) {
        uint32_t buf, len;
        std::memcpy(&buf, iov_p + i * 8, 4);
        std::memcpy(&len, iov_p + i * 8 + 4, 4);
        uint8_t* src = inst.mem(buf, len);
        if (!src) return w_fault;
        switch (e->kind) {
            case WasiContext::FdEntry::stdout_k:
                inst.wasi().stdout_bytes.insert(inst.wasi().stdout_bytes.end(), src, src + len);
                total += len;
                break;
            case WasiContext::FdEntry::stderr_k:
                inst.wasi().stderr_bytes.insert(inst.wasi().stderr_bytes.end(), src, src + len);
                total += len;
                break;
            case WasiContext::FdEntry::file: {
                ssize_t n = ::write(e->host_fd, src, len);
                if (n < 0) return errno_to_wasi(errno);
                total += static_cast<uint64_t>(n);
                break;
            }
            case WasiContext::FdEntry::dir:
                return w_isdir;
            default:
                return w_badf;
        }
    }
    W32::u32(ret_p, static_cast<uint32_t>(total));
    return w_success;
}

uint32_t wasi_fd_seek(Instance& inst, const uint64_t* a) {
    auto* e = fd_entry(inst, a[0]);
    if (!e) return w_badf;
    if (e->kind != WasiContext::FdEntry::file) return w_spipe;
    int whence;
    switch (static_cast<uint32_t>(a[2])) {
        case 0: whence = SEEK_SET; break;
        case 1: whence = SEEK_CUR; break;
        case 2: whence = SEEK_END; break;
        default: return w_inval;
    }
    off_t r = ::lseek(e->host_fd, static_cast<int64_t>(a[1]), whence);
    if (r < 0) return errno_to_wasi(errno);
    uint8_t* p = inst.mem(static_cast<uint32_t>(a[3]), 8);
    if (!p) return w_fault;
    W32::u64(p, static_cast<uint64_t>(r));
    return w_success;
}

uint32_t wasi_fd_tell(Instance& inst, const uint64_t* a) {
    auto* e = fd_entry(inst, a[0]);
    if (!e) return w_badf;
    if (e->kind != WasiContext::FdEntry::file) return w_spipe;
    off_t r = ::lseek(e->host_fd, 0, SEEK_CUR);
    if (r < 0) return errno_to_wasi(errno);
    uint8_t* p = inst.mem(static_cast<uint32_t>(a[1]), 8);
    if (!p) return w_fault;
    W32::u64(p, static_cast<uint64_t>(r));
    return w_success;
}

// WASI open flags.
constexpr uint32_t kOflagCreat = 1;
constexpr uint32_t kOflagDirectory = 2;
constexpr uint32_t kOflagExcl = 4;
constexpr uint32_t kOflagTrunc = 8;
constexpr uint64_t kRightRead = 1ull << 1;
constexpr uint64_t kRightWrite = 1ull << 6;
constexpr uint32_t kFdflagAppend = 1;

uint32_t wasi_path_open(Instance& inst, const uint64_t* a) {
    auto* e = fd_entry(inst, a[0]);
    if (!e || e->kind != WasiContext::FdEntry::dir) return w_badf;
    uint32_t path_ptr = static_cast<uint32_t>(a[2]);
    uint32_t path_len = static_cast<uint32_t>(a[3]);
    uint32_t oflags = static_cast<uint32_t>(a[4]);
    uint64_t rights = a[5];
    uint32_t fdflags = static_cast<uint32_t>(a[7]);
    uint8_t* ret_p = inst.mem(static_cast<uint32_t>(a[8]), 4);
    uint8_t* path_p = inst.mem(path_ptr, path_len);
    if (!ret_p || !path_p) return w_fault;
    std::string path(reinterpret_cast<char*>(path_p), path_len);

    std::vector<std::string> comps;
    if (!normalize(path, comps)) return w_notcapable;

    ScopedFd parent;
    std::string leaf;
    if (uint32_t err = walk_parent(e->host_fd, comps, parent, leaf); err != w_success) return err;

    int flags = O_CLOEXEC | O_NOFOLLOW;
    bool want_write = (rights & kRightWrite) || (oflags & (kOflagCreat | kOflagTrunc));
    bool want_read = (rights & kRightRead) || rights == 0;
    flags |= want_write ? (want_read ? O_RDWR : O_WRONLY) : O_RDONLY;
    if (oflags & kOflagCreat) flags |= O_CREAT;
    if (oflags & kOflagExcl) flags |= O_EXCL;
    if (oflags & kOflagTrunc) flags |= O_TRUNC;
    if (oflags & kOflagDirectory) flags = (flags & ~O_ACCMODE) | O_RDONLY | O_DIRECTORY;
    if (fdflags & kFdflagAppend) flags |= O_APPEND;

    int fd = ::openat(parent.fd, leaf.c_str(), flags, 0644);
    if (fd < 0) return errno_to_wasi(errno);

    int32_t guest_fd = inst.wasi().alloc_fd(WasiContext::FdEntry{WasiContext::FdEntry::file, fd, 0});
    W32::u32(ret_p, static_cast<uint32_t>(guest_fd));
    return w_success;
}

uint32_t wasi_path_filestat_get(Instance& inst, const uint64_t* a) {
    auto* e = fd_entry(inst, a[0]);
    if (!e || e->kind != WasiContext::FdEntry::dir) return w_badf;
    uint32_t path_ptr = static_cast<uint32_t>(a[2]);
    uint32_t path_len = static_cast<uint32_t>(a[3]);
    uint8_t* ret_p = inst.mem(static_cast<uint32_t>(a[4]), 64);
    uint8_t* path_p = inst.mem(path_ptr, path_len);
    if (!ret_p || !path_p) return w_fault;
    std::string path(reinterpret_cast<char*>(path_p), path_len);

    std::vector<std::string> comps;
    if (!normalize(path, comps)) return w_notcapable;
    ScopedFd parent;
    std::string leaf;
    if (uint32_t err = walk_parent(e->host_fd, comps, parent, leaf); err != w_success) return err;

    struct stat st{};
    if (fstatat(parent.fd, leaf.c_str(), &st, AT_SYMLINK_NOFOLLOW) != 0) return errno_to_wasi(errno);
    fill_filestat(ret_p, st);
    return w_success;
}

uint32_t wasi_proc_exit(Instance&, const uint64_t* a) {
    throw GuestExit{static_cast<int32_t>(static_cast<uint32_t>(a[0]))};
}

uint32_t wasi_random_get(Instance& inst, const uint64_t* a) {
    uint32_t len = static_cast<uint32_t>(a[1]);
    uint8_t* p = inst.mem(static_cast<uint32_t>(a[0]), len);
    if (!p) return w_fault;
    static thread_local std::mt19937_64 rng{std::random_device{}()};
    for (uint32_t i = 0; i < len; ++i) p[i] = static_cast<uint8_t>(rng());
    return w_success;
}

uint32_t wasi_sched_yield(Instance&, const uint64_t*) {
    std::this_thread::yield();
    return w_success;
}

uint32_t wasi_poll_oneoff(Instance&, const uint64_t*) { return w_notsup; }

const std::unordered_map<std::string, WasiContext::HostEntry>& host_table() {
    // {fn, n_params, n_results, i64 param mask}
    static const std::unordered_map<std::string, WasiContext::HostEntry> table = {
        {"args_get", {wasi_args_get, 2, 1, 0}},
        {"args_sizes_get", {wasi_args_sizes_get, 2, 1, 0}},
        {"environ_get", {wasi_environ_get, 2, 1, 0}},
        {"environ_sizes_get", {wasi_environ_sizes_get, 2, 1, 0}},
        {"clock_res_get", {wasi_clock_res_get, 2, 1, 0}},
        {"clock_time_get", {wasi_clock_time_get, 3, 1, 0b010}},
        {"fd_close", {wasi_fd_close, 1, 1, 0}},
        {"fd_fdstat_get", {wasi_fd_fdstat_get, 2, 1, 0}},
        {"fd_fdstat_set_flags", {wasi_fd_fdstat_set_flags, 2, 1, 0}},
        {"fd_filestat_get", {wasi_fd_filestat_get, 2, 1, 0}},
        {"fd_prestat_get", {wasi_fd_prestat_get, 2, 1, 0}},
        {"fd_prestat_dir_name", {wasi_fd_prestat_dir_name, 3, 1, 0}},
        {"fd_read", {wasi_fd_read, 4, 1, 0}},
        {"fd_seek", {wasi_fd_seek, 4, 1, 0b0010}},
        {"fd_tell", {wasi_fd_tell, 2, 1, 0}},
        {"fd_write", {wasi_fd_write, 4, 1, 0}},
        {"path_open", {wasi_path_open, 9, 1, 0b001100000}},
        {"path_filestat_get", {wasi_path_filestat_get, 5, 1, 0}},
        {"proc_exit", {wasi_proc_exit, 1, 0, 0}},
        {"random_get", {wasi_random_get, 2, 1, 0}},
        {"sched_yield", {wasi_sched_yield, 0, 1, 0}},
        {"poll_oneoff", {wasi_poll_oneoff, 4, 1, 0}},
    };
    return table;
}

}  // namespace

WasiContext::WasiContext(WasiConfig config) : cfg(std::move(config)) {
    fds.resize(3 + cfg.preopens.size());
    fds[0] = FdEntry{FdEntry::stdin_k, -1, 0};
    fds[1] = FdEntry{FdEntry::stdout_k, -1, 0};
    fds[2] = FdEntry{FdEntry::stderr_k, -1, 0};
    for (size_t i = 0; i < cfg.preopens.size(); ++i) {
        int fd = ::open(cfg.preopens[i].host_dir.c_str(), O_RDONLY | O_DIRECTORY | O_CLOEXEC);
        if (fd < 0) {
            throw Trap(TrapKind::host,
                       "cannot open preopen directory " + cfg.preopens[i].host_dir + ": " + std::strerror(errno));
        }
        fds[3 + i] = FdEntry{FdEntry::dir, fd, static_cast<uint32_t>(i)};
    }
}

WasiContext::~WasiContext() {
    for (FdEntry& e : fds) {
        if ((e.kind == FdEntry::file || e.kind == FdEntry::dir) && e.host_fd >= 0) ::close(e.host_fd);
    }
}

int32_t WasiContext::alloc_fd(FdEntry e) {
    for (size_t i = 3; i < fds.size(); ++i) {
        if (fds[i].kind == FdEntry::empty) {
            fds[i] = e;
            return static_cast<int32_t>(i);
        }
    }
    fds.push_back(e);
    return static_cast<int32_t>(fds.size() - 1);
}

const WasiContext::HostEntry* WasiContext::resolve(const std::string& module, const std::string& name) {
    if (module != "wasi_snapshot_preview1" && module != "wasi_unstable") return nullptr;
    const auto& table = host_table();
    auto it = table.find(name);
    return it == table.end() ? nullptr : &it->second;
}

}  // namespace wasmless::engine
