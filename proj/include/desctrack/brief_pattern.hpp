#pragma once

// Generated by tools/gen_brief_pattern.py; do not edit.

namespace desctrack {

/// Test-point pairs {ax, ay, bx, by} of the steered binary descriptor.
inline constexpr int kBriefPattern[256][4] = {
    {12, 3, -4, 12},
    {-8, 5, 9, -6},
    {8, 10, -1, 2},
    {6, -9, -3, -2},
    {-5, 3, 4, -10},
    {1, 0, -1, 9},
    {-4, 0, -1, 3},
    {-2, -1, 2, 0},
    {12, 4, 5, 2},
    {-1, -1, -2, 7},
    {1, 12, -7, 0},
    {4, -1, 12, 1},
    {4, -12, -10, 4},
    {-12, 4, -3, 7},
    {1, -10, 10, -3},
    {-6, -3, -10, 7},
    {-3, -3, -2, 3},
    {10, -7, -3, 7},
    {-2, 10, 0, 3},
    {-6, -2, -3, 2},
    {-1, -12, 3, -4},
    {-12, -1, -1, 6},
    {0, 3, 8, -3},
    {5, 4, -1, -3},
    {-3, 3, -2, -3},
    {6, 3, 6, -4},
    {-2, -7, 9, 2},
    {3, -10, -6, -11},
    {4, 7, -12, 4},
    {7, 3, 1, -6},
    {-4, -6, -3, 8},
    {-3, 3, 3, 4},
    {-6, -4, -3, 2},
    {1, -2, -12, 3},
    {-1, -5, 1, 3},
    {12, -2, -5, 12},
    {-2, -3, 0, -1},
    {-2, -9, 6, 1},
    {4, 0, -10, -6},
    {-5, -2, 4, 4},
    {-8, 4, -8, -1},
    {2, -5, -2, -1},
    {-10, 2, 5, -7},
    {-10, -4, 4, 12},
    {-10, -8, -1, -4},
    {6, -2, 2, 7},
    {-6, -3, 12, 4},
    {6, -3, -4, 2},
    {2, -3, 2, -2},
    {8, 0, -5, 6},
    {-8, 0, 4, -3},
    {6, 2, -5, 5},
    {1, 8, 5, -11},
    {0, -4, 3, -3},
    {-10, -3, -10, -7},
    {-6, 10, -11, -1},
    {3, -11, -6, 2},
    {8, 7, -6, 5},
    {-3, -2, 7, -6},
    {7, -5, 9, 5},
    {-3, 1, -1, -10},
    {3, -10, 1, -12},
    {9, -2, -2, 0},
    {5, 0, 13, 0},
    {-4, 2, -2, -7},
    {6, -2, -3, 1},
    {-9, -5, -3, -1},
    {2, 6, 2, -1},
    {2, -8, 2, 10},
    {6, 6, -5, 0},
    {2, -7, 2, -9},
    {0, 7, -1, 6},
    {1, -1, 6, -2},
    {7, -2, -4, 0},
    {7, -7, -2, 4},
    {10, 2, 7, -1},
    {-7, 10, 9, 2},
    {-12, 5, 1, 1},
    {1, -5, -5, 1},
    {-3, 12, 12, -5},
    {1, -7, 3, -9},
    {10, 7, 10, -4},
    {-4, 11, -9, -9},
    {5, -2, 0, -4},
    {3, -12, 12, 1},
    {4, -12, -11, 1},
    {-13, 0, 10, -3},
    {-1, -3, 5, -3},
    {5, 0, 5, 2},
    {6, 6, 4, 8},
    {0, -6, 9, 3},
    {-2, 1, -2, 2},
    {8, 2, -6, -11},
    {0, -5, 2, 3},
    {-4, -10, -9, 3},
    {-7, -2, -3, -12},
    {-11, 6, 9, -3},
    {1, 2, -5, 2},
    {1, 10, 0, -4},
    {6, 10, -3, -12},
    {4, 7, -6, 5},
    {-5, 0, 2, 0},
    {0, 0, 2, -1},
    {-7, 5, 8, -6},
    {2, 1, -4, -7},
    {-1, 10, 7, -3},
    {-10, 6, -2, -5},
    {-12, 1, 3, 1},
    {3, 4, -12, 2},
    {4, 6, -8, -1},
    {3, -3, -3, 0},
    {3, -8, 2, 0},
    {-8, -5, -1, -3},
    {-9, 2, -6, -11},
    {-4, -5, 8, 4},
    {-2, 6, 9, -9},
    {11, -6, -7, 3},
    {-2, -1, -5, 7},
    {3, 0, -3, 4},
    {-2, -9, -10, -5},
    {-7, 7, -5, 1},
    {-3, 12, -5, 12},
    {7, 2, 0, 5},
    {-4, 10, -11, -5},
    {-6, 2, -4, -5},
    {2, 7, 1, 3},
    {0, -2, -5, 7},
    {-11, -2, 2, -4},
    {1, -10, 2, -6},
    {-2, -10, 0, 10},
    {-4, -2, -6, 0},
    {8, 5, -7, 0},
    {1, 10, -1, 0},
    {-3, 5, -3, -1},
    {0, 13, 0, 9},
    {0, 4, -8, -6},
    {-1, -12, -4, -4},
    {-1, -2, -7, 5},
    {-3, -5, -4, -5},
    {0, 10, 0, -3},
    {-1, -12, 1, -5},
    {-5, -4, 8, 5},
    {-1, -9, 5, -4},
    {-5, -1, 3, -7},
    {-5, -6, -5, 2},
    {0, -1, 0, 1},
    {3, 6, 4, 1},
    {-12, 3, 2, 0},
    {-2, 2, -6, -3},
    {3, -11, -11, -1},
    {-3, 0, -1, -5},
    {-6, 0, -6, 3},
    {-5, 8, -7, -7},
    {-1, 2, 9, -9},
    {-3, 12, -9, -1},
    {-6, 5, 4, -5},
    {12, -3, -12, 2},
    {-1, -7, 2, 9},
    {7, 5, 3, -9},
    {-12, -4, -3, 6},
    {5, 12, -7, -4},
    {3, 5, 7, -3},
    {10, -3, -6, -5},
    {-12, -1, 1, -2},
    {0, -6, -7, 0},
    {-5, 12, -2, 0},
    {-10, -4, 4, 3},
    {7, -3, -2, -3},
    {-4, -2, -1, -4},
    {12, 2, 3, 12},
    {-5, -9, 2, -2},
    {1, 2, -7, 10},
    {-4, 0, 3, 11},
    {2, -6, -12, -3},
    {-5, -5, 1, -12},
    {-9, 1, 7, -10},
    {-7, 2, -3, 7},
    {-2, 0, 5, -7},
    {-4, 6, -3, 3},
    {4, 12, -4, 2},
    {2, 9, -1, -1},
    {12, -4, 6, -11},
    {-5, -2, -3, -1},
    {2, 4, -1, -1},
    {1, 0, -1, 5},
    {0, -1, 0, -11},
    {-4, -7, -7, 1},
    {-3, 2, -10, 7},
    {-11, 6, -9, 1},
    {-2, 6, -3, -12},
    {1, -12, -3, 2},
    {3, -2, -7, -2},
    {7, 0, -1, 1},
    {-8, -5, 3, 4},
    {-3, -4, 3, 7},
    {-2, 4, 2, 12},
    {-9, -7, -7, -2},
    {1, -6, -2, -8},
    {1, -3, -4, -1},
    {3, -3, 4, 9},
    {-6, -2, -1, 4},
    {3, -8, 7, 4},
    {-4, 8, -5, -4},
    {2, -9, 4, 5},
    {3, 1, -11, 6},
    {8, -6, -2, 1},
    {-4, 3, 2, 8},
    {12, -1, 7, -7},
    {7, 9, -5, 7},
    {2, -9, 0, 3},
    {1, 5, 6, -7},
    {-2, 0, -9, 2},
    {1, 9, 7, 6},
    {-5, -6, 11, 6},
    {-6, -10, 8, 0},
    {-2, -10, -12, 3},
    {5, -8, -1, 4},
    {-5, 8, 4, 0},
    {-3, -5, 8, 10},
    {0, 3, 0, 0},
    {6, -10, -8, 6},
    {8, 9, -3, -5},
    {2, -12, 3, -3},
    {0, -2, 4, -6},
    {-3, 3, 10, 6},
    {-4, -7, -8, 2},
    {-10, -2, -5, 5},
    {-2, -9, 3, 5},
    {12, 3, 3, -1},
    {10, 3, -13, 0},
    {2, 8, 6, 2},
    {1, 12, 9, -9},
    {12, 4, 8, 6},
    {-3, 2, -1, 4},
    {-9, 6, 7, 10},
    {7, 10, -7, -5},
    {-1, 0, -10, 1},
    {-8, 3, -4, 3},
    {-5, -7, 4, 12},
    {2, 1, 4, 2},
    {5, -8, 2, -3},
    {9, -9, -13, 0},
    {-7, -6, -3, 2},
    {1, 3, 0, 6},
    {-5, -5, 2, -3},
    {-5, 3, -7, -10},
    {1, 7, -3, -2},
    {5, -4, -6, 6},
    {5, -4, 2, -2},
    {4, 10, 7, -1},
    {-12, -4, -5, 8},
    {4, -2, -2, -5},
    {9, 0, -10, -8},
    {1, -4, -2, -1},
    {5, -7, 5, 7},
    {-7, -7, 0, -5},
};

}  // namespace desctrack
