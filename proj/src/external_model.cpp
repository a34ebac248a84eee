#include <cerrno>
#include <chrono>
#include <csignal>
#include <cstring>
#include <string>
#include <vector>

#include <fcntl.h>
#include <poll.h>
#include <sys/wait.h>
#include <unistd.h>

#include "synthwright/errors.hpp"
#include "synthwright/model.hpp"

namespace synthwright {

namespace {

// A dead child must surface as an exit-status error, not a SIGPIPE kill.
void ignore_sigpipe() {
    static const bool done = [] {
        std::signal(SIGPIPE, SIG_IGN);
        return true;
    }();
    (void)done;
}

struct Pipe {
    int read_end = -1;
    int write_end = -1;
    Pipe() {
        int fds[2];
        if (pipe(fds) != 0) throw IoError("pipe failed: " + std::string(std::strerror(errno)));
        read_end = fds[0];
        write_end = fds[1];
    }
    ~Pipe() {
        close_read();
        close_write();
    }
    void close_read() {
        if (read_end >= 0) close(read_end);
        read_end = -1;
    }
    void close_write() {
        if (write_end >= 0) close(write_end);
        write_end = -1;
    }
};

std::int64_t now_ms() {
    return std::chrono::duration_cast<std::chrono::milliseconds>(
               std::chrono::steady_clock::now().time_since_epoch())
        .count();
}

std::vector<std::string> split_lines(const std::string& text) {
    std::vector<std::string> lines;
    std::string cur;
    for (char c : text) {
        if (c == '\n') {
            if (!cur.empty() && cur.back() == '\r') cur.pop_back();
            lines.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) lines.push_back(cur); // tolerate a missing final newline
    return lines;
}

} // namespace

ExternalModel::ExternalModel(std::string command, int timeout_ms)
    : command_(std::move(command)), timeout_ms_(timeout_ms) {
    if (command_.empty()) throw ValidationError("external model command is empty");
}

std::vector<std::string> ExternalModel::predict(const Dataset& rows) const {
    ignore_sigpipe();
    std::string input = csv_text(rows);

    Pipe to_child;
    Pipe from_child;
    pid_t pid = fork();
    if (pid < 0) throw IoError("fork failed: " + std::string(std::strerror(errno)));
    if (pid == 0) {
        dup2(to_child.read_end, STDIN_FILENO);
        dup2(from_child.write_end, STDOUT_FILENO);
        to_child.close_read();
        to_child.close_write();
        from_child.close_read();
        from_child.close_write();
        execl("/bin/sh", "sh", "-c", command_.c_str(), static_cast<char*>(nullptr));
        _exit(127);
    }
    to_child.close_read();
    from_child.close_write();

    // Interleave writing and reading so a child that streams output while we
    // are still feeding input cannot deadlock either pipe.
    std::string output;
    std::size_t written = 0;
    bool timed_out = false;
    const std::int64_t deadline = now_ms() + timeout_ms_;
    while (true) {
        struct pollfd fds[2];
        int nfds = 0;
        int write_slot = -1, read_slot = -1;
        if (to_child.write_end >= 0) {
            write_slot = nfds;
            fds[nfds++] = {to_child.write_end, POLLOUT, 0};
        }
        if (from_child.read_end >= 0) {
            read_slot = nfds;
            fds[nfds++] = {from_child.read_end, POLLIN, 0};
        }
        if (nfds == 0) break;

        std::int64_t remaining = deadline - now_ms();
        if (remaining <= 0) {
            timed_out = true;
            break;
        }
        int rc = poll(fds, static_cast<nfds_t>(nfds), static_cast<int>(remaining));
        if (rc < 0) {
            if (errno == EINTR) continue;
            kill(pid, SIGKILL);
            waitpid(pid, nullptr, 0);
            throw IoError("poll failed: " + std::string(std::strerror(errno)));
        }
        if (rc == 0) {
            timed_out = true;
            break;
        }

        if (write_slot >= 0 && (fds[write_slot].revents & (POLLOUT | POLLERR | POLLHUP))) {
            if (written >= input.size() || (fds[write_slot].revents & (POLLERR | POLLHUP))) {
                to_child.close_write(); // EOF for the child (or it hung up)
            } else {
                ssize_t n = write(to_child.write_end, input.data() + written,
                                  input.size() - written);
                if (n > 0) {
                    written += static_cast<std::size_t>(n);
                    if (written >= input.size()) to_child.close_write();
                } else if (n < 0 && errno != EINTR && errno != EAGAIN) {
                    to_child.close_write(); // child stopped reading; collect its output
                }
            }
        }
        if (read_slot >= 0 && (fds[read_slot].revents & (POLLIN | POLLERR | POLLHUP))) {
            char buf[65536];
            ssize_t n = read(from_child.read_end, buf, sizeof buf);
            if (n > 0)
                output.append(buf, static_cast<std::size_t>(n));
            else if (n == 0 || (n < 0 && errno != EINTR && errno != EAGAIN))
                from_child.close_read();
        }
    }

    if (timed_out) {
        kill(pid, SIGKILL);
        waitpid(pid, nullptr, 0);
        throw Error("external model timed out after " + std::to_string(timeout_ms_) + " ms");
    }

    int status = 0;
    if (waitpid(pid, &status, 0) < 0)
        throw IoError("waitpid failed: " + std::string(std::strerror(errno)));
    if (!WIFEXITED(status) || WEXITSTATUS(status) != 0) {
        std::string detail = WIFEXITED(status)
                                 ? "exit code " + std::to_string(WEXITSTATUS(status))
                                 : "killed by signal " + std::to_string(WTERMSIG(status));
        throw Error("external model failed (" + detail + ")");
    }

    std::vector<std::string> labels = split_lines(output);
    if (labels.size() != rows.row_count())
        throw Error("external model returned " + std::to_string(labels.size()) +
                    " labels for " + std::to_string(rows.row_count()) + " rows");
    return labels;
}

} // namespace synthwright
