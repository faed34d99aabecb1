#include "homwalk/gadgets.hpp"
#include "homwalk/walk.hpp"
#include "homwalk/io.hpp"
int main() {
    auto qg = homwalk::qubit_graph(1);
    auto X = homwalk::qubit_complex(qg);
    return X.count(1) == 9 ? 0 : 1;
}
