#ifndef MATEBENCH_SUBPROCESS_HPP
#define MATEBENCH_SUBPROCESS_HPP

// Line-oriented child process over POSIX pipes. The command is a shell
// string (exec'd, so the shell does not linger), which allows engines that
// are scripts, e.g. "node .../stockfish.js".

#include <csignal>
#include <cstring>
#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

namespace matebench {

struct SubprocessError : std::runtime_error {
    explicit SubprocessError(const std::string& what) : std::runtime_error(what) {}
};

class Subprocess {
public:
    explicit Subprocess(const std::string& command) {
        // A dead child must surface as EPIPE on write, not a fatal signal.
        std::signal(SIGPIPE, SIG_IGN);

        int to_child[2], from_child[2];
        if (pipe(to_child) != 0 || pipe(from_child) != 0)
            throw SubprocessError("pipe failed: " + std::string(std::strerror(errno)));

        pid_ = fork();
        if (pid_ < 0) throw SubprocessError("fork failed: " + std::string(std::strerror(errno)));
        if (pid_ == 0) {
            dup2(to_child[0], STDIN_FILENO);
            dup2(from_child[1], STDOUT_FILENO);
            close(to_child[0]);
            close(to_child[1]);
            close(from_child[0]);
            close(from_child[1]);
            std::string wrapped = "exec " + command;
            execl("/bin/sh", "sh", "-c", wrapped.c_str(), static_cast<char*>(nullptr));
            _exit(127);
        }
        close(to_child[0]);
        close(from_child[1]);
        in_fd_ = to_child[1];
        out_fd_ = from_child[0];
    }

    Subprocess(const Subprocess&) = delete;
    Subprocess& operator=(const Subprocess&) = delete;

    ~Subprocess() { terminate(); }

    void write_line(const std::string& line) {
        std::string data = line + "\n";
        size_t off = 0;
        while (off < data.size()) {
            ssize_t n = ::write(in_fd_, data.data() + off, data.size() - off);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw SubprocessError("write to child failed: " +
                                      std::string(std::strerror(errno)));
            }
            off += static_cast<size_t>(n);
        }
    }

    // Next full line without its newline; std::nullopt on timeout or EOF.
    std::optional<std::string> read_line(std::chrono::milliseconds timeout) {
        auto deadline = std::chrono::steady_clock::now() + timeout;
        for (;;) {
            auto nl = buf_.find('\n');
            if (nl != std::string::npos) {
                std::string line = buf_.substr(0, nl);
                buf_.erase(0, nl + 1);
                if (!line.empty() && line.back() == '\r') line.pop_back();
                return line;
            }
            auto remaining = std::chrono::duration_cast<std::chrono::milliseconds>(
                deadline - std::chrono::steady_clock::now());
            if (remaining.count() <= 0) return std::nullopt;

            pollfd pfd{out_fd_, POLLIN, 0};
            int rc = ::poll(&pfd, 1, static_cast<int>(remaining.count()));
            if (rc < 0) {
                if (errno == EINTR) continue;
                throw SubprocessError("poll failed: " + std::string(std::strerror(errno)));
            }
            if (rc == 0) return std::nullopt;

            char chunk[4096];
            ssize_t n = ::read(out_fd_, chunk, sizeof chunk);
            if (n < 0) {
                if (errno == EINTR) continue;
                throw SubprocessError("read from child failed: " +
                                      std::string(std::strerror(errno)));
            }
            if (n == 0) return std::nullopt;  // EOF
            buf_.append(chunk, static_cast<size_t>(n));
        }
    }

    bool running() {
        if (pid_ <= 0) return false;
        int status = 0;
        pid_t rc = waitpid(pid_, &status, WNOHANG);
        if (rc == pid_) pid_ = -pid_;  // reaped; remember it is gone
        return rc == 0;
    }

    void terminate() {
        if (pid_ > 0) {
            kill(pid_, SIGTERM);
            int status = 0;
            for (int wait_ms = 0; wait_ms < 2000; wait_ms += 50) {
                if (waitpid(pid_, &status, WNOHANG) == pid_) {
                    pid_ = -1;
                    break;
                }
                usleep(50 * 1000);
            }
            if (pid_ > 0) {
                kill(pid_, SIGKILL);
                waitpid(pid_, &status, 0);
                pid_ = -1;
            }
        }
        if (in_fd_ >= 0) close(in_fd_);
        if (out_fd_ >= 0) close(out_fd_);
        in_fd_ = out_fd_ = -1;
    }

private:
    pid_t pid_ = -1;
    int in_fd_ = -1;
    int out_fd_ = -1;
    std::string buf_;
};

}  // namespace matebench

#endif  // MATEBENCH_SUBPROCESS_HPP
