#pragma once

namespace oculo {

/// Caps how many grid workers may run concurrently across the toolkit.
/// n <= 0 restores the hardware-concurrency default.
void set_max_workers(int n);
int max_workers();

/// RAII occupancy of one slot in the global worker pool; blocks while the
/// pool is full. Results never depend on acquisition order.
class WorkerSlot {
public:
    WorkerSlot();
    ~WorkerSlot();
    WorkerSlot(const WorkerSlot&) = delete;
    WorkerSlot& operator=(const WorkerSlot&) = delete;
};

}  // namespace oculo
