#pragma once

// Reference confusion-matrix rows with their published percentage renderings.
// mask bits record which printed values are arithmetically consistent with
// the printed counts (bit0 accuracy, bit1 precision, bit2 recall, bit3 f1);
// a handful of reference rows carry typos and fail their own counts.

#include <array>

namespace testsupport {

struct ReferenceRow {
  const char* table;
  const char* condition;
  const char* detector;
  long tp, tn, fp, fn;
  const char* accuracy;
  const char* precision;
  const char* recall;
  const char* f1;
  unsigned mask;  // bit set = printed value reproduces from the counts
};

inline constexpr std::array<ReferenceRow, 66> kReferenceRows = {{
    {"I", "original", "Gmail", 573, 589, 27, 11, "96.83", "95.50", "98.12", "96.79", 0xFu},
    {"I", "original", "Proofpoint", 558, 592, 41, 8, "96.16", "93.00", "98.59", "95.71", 0x4u},
    {"I", "original", "SpamAssassin", 574, 576, 26, 24, "95.83", "95.67", "95.99", "95.83", 0xFu},
    {"I", "original", "NaiveBayes", 559, 567, 41, 33, "93.80", "93.17", "94.43", "93.79", 0xEu},
    {"I", "original", "SVM", 542, 555, 58, 45, "91.42", "90.33", "92.33", "91.32", 0xFu},
    {"I", "original", "LogReg", 554, 569, 46, 31, "93.58", "92.33", "94.70", "93.50", 0xFu},
    {"I", "zero_shot_rephrased", "Gmail", 573, 559, 27, 41, "94.33", "95.50", "93.32", "94.40", 0xFu},
    {"I", "zero_shot_rephrased", "Proofpoint", 558, 554, 42, 46, "92.67", "93.00", "92.38", "92.69", 0xFu},
    {"I", "zero_shot_rephrased", "SpamAssassin", 574, 545, 26, 55, "93.25", "95.67", "91.26", "93.41", 0xFu},
    {"I", "zero_shot_rephrased", "NaiveBayes", 559, 518, 41, 82, "89.75", "93.17", "87.21", "90.09", 0xFu},
    {"I", "zero_shot_rephrased", "SVM", 542, 533, 58, 67, "89.58", "90.33", "89.00", "89.66", 0xFu},
    {"I", "zero_shot_rephrased", "LogReg", 554, 515, 46, 85, "89.08", "92.33", "86.70", "89.43", 0xFu},
    {"I", "few_shot_rephrased", "Gmail", 573, 483, 27, 117, "88.00", "95.50", "83.04", "88.84", 0xFu},
    {"I", "few_shot_rephrased", "Proofpoint", 558, 505, 42, 95, "88.58", "93.00", "85.45", "89.07", 0xFu},
    {"I", "few_shot_rephrased", "SpamAssassin", 574, 465, 26, 135, "86.50", "95.67", "80.96", "87.70", 0xEu},
    {"I", "few_shot_rephrased", "NaiveBayes", 559, 418, 41, 182, "81.42", "93.17", "75.44", "83.37", 0xFu},
    {"I", "few_shot_rephrased", "SVM", 542, 421, 58, 179, "80.25", "90.33", "75.17", "82.06", 0xFu},
    {"I", "few_shot_rephrased", "LogReg", 554, 460, 46, 140, "84.50", "92.33", "79.83", "85.63", 0xFu},
    {"II", "original", "GPT-4", 391, 395, 9, 5, "98.25", "97.75", "98.74", "98.24", 0xFu},
    {"II", "original", "GPT-3.5", 386, 384, 14, 16, "96.25", "96.50", "96.02", "96.26", 0xFu},
    {"II", "original", "Claude", 385, 392, 15, 8, "97.12", "96.25", "97.96", "97.10", 0xFu},
    {"II", "original", "Llama3", 389, 397, 11, 3, "98.25", "97.25", "99.23", "98.23", 0xFu},
    {"II", "original", "Gemini", 385, 389, 15, 11, "96.75", "96.25", "97.22", "96.73", 0xFu},
    {"II", "zero_shot_rephrased", "GPT-4", 391, 369, 9, 31, "95.00", "97.75", "92.65", "95.13", 0xFu},
    {"II", "zero_shot_rephrased", "GPT-3.5", 386, 347, 14, 53, "91.62", "96.50", "87.93", "92.01", 0xFu},
    {"II", "zero_shot_rephrased", "Claude", 385, 361, 15, 39, "93.25", "96.25", "90.80", "93.45", 0xFu},
    {"II", "zero_shot_rephrased", "Llama3", 389, 370, 11, 30, "94.88", "97.25", "92.84", "94.99", 0xFu},
    {"II", "zero_shot_rephrased", "Gemini", 385, 342, 15, 58, "90.88", "96.25", "86.91", "91.34", 0xFu},
    {"II", "few_shot_rephrased", "GPT-4", 391, 353, 9, 47, "93.00", "97.75", "89.27", "93.32", 0xFu},
    {"II", "few_shot_rephrased", "GPT-3.5", 386, 322, 14, 78, "88.50", "96.50", "83.19", "89.35", 0xFu},
    {"II", "few_shot_rephrased", "Claude", 385, 354, 15, 46, "92.38", "96.25", "89.33", "92.66", 0xFu},
    {"II", "few_shot_rephrased", "Llama3", 389, 346, 11, 54, "91.88", "97.25", "87.81", "92.29", 0xFu},
    {"II", "few_shot_rephrased", "Gemini", 385, 276, 15, 124, "82.62", "96.25", "75.64", "84.71", 0xFu},
    {"III", "original", "Gmail", 387, 396, 13, 4, "97.88", "96.75", "98.98", "97.85", 0xFu},
    {"III", "original", "SpamAssassin", 378, 396, 22, 4, "96.75", "94.50", "98.95", "96.68", 0xFu},
    {"III", "original", "Proofpoint", 368, 399, 32, 1, "95.88", "92.00", "99.73", "95.71", 0xFu},
    {"III", "original", "NaiveBayes", 375, 388, 25, 12, "95.38", "93.75", "96.90", "95.30", 0xFu},
    {"III", "original", "SVM", 379, 390, 21, 10, "96.12", "94.75", "97.43", "96.07", 0xFu},
    {"III", "original", "LogReg", 381, 393, 19, 7, "96.75", "95.25", "98.20", "96.70", 0xFu},
    {"III", "zero_shot_rephrased", "Gmail", 387, 351, 13, 49, "92.25", "96.75", "88.76", "92.58", 0xFu},
    {"III", "zero_shot_rephrased", "SpamAssassin", 378, 357, 22, 43, "91.88", "94.50", "89.79", "92.08", 0xFu},
    {"III", "zero_shot_rephrased", "Proofpoint", 368, 373, 32, 27, "92.62", "92.00", "93.16", "92.58", 0xFu},
    {"III", "zero_shot_rephrased", "NaiveBayes", 375, 349, 25, 51, "90.50", "93.75", "88.03", "90.80", 0xFu},
    {"III", "zero_shot_rephrased", "SVM", 379, 343, 21, 57, "90.25", "94.75", "86.93", "90.67", 0xFu},
    {"III", "zero_shot_rephrased", "LogReg", 381, 335, 19, 65, "89.50", "95.25", "85.43", "90.07", 0xFu},
    {"III", "few_shot_rephrased", "Gmail", 387, 349, 13, 51, "92.00", "96.75", "88.36", "92.36", 0xFu},
    {"III", "few_shot_rephrased", "SpamAssassin", 378, 340, 22, 60, "89.75", "94.50", "86.30", "90.21", 0xFu},
    {"III", "few_shot_rephrased", "Proofpoint", 368, 376, 32, 24, "93.00", "92.00", "93.88", "92.93", 0xFu},
    {"III", "few_shot_rephrased", "NaiveBayes", 375, 336, 25, 64, "88.88", "93.75", "85.42", "89.39", 0xFu},
    {"III", "few_shot_rephrased", "SVM", 379, 318, 21, 82, "87.12", "94.75", "82.21", "88.04", 0xFu},
    {"III", "few_shot_rephrased", "LogReg", 381, 327, 19, 73, "88.50", "95.25", "83.92", "89.23", 0xFu},
    {"IV", "original", "GPT-4", 394, 399, 6, 1, "99.12", "98.50", "99.75", "99.12", 0xFu},
    {"IV", "original", "GPT-3.5", 379, 384, 21, 16, "95.38", "94.75", "95.95", "95.35", 0xFu},
    {"IV", "original", "Claude", 394, 390, 6, 10, "98.00", "98.50", "97.52", "98.01", 0xFu},
    {"IV", "original", "Llama3", 392, 396, 8, 4, "98.50", "98.00", "98.99", "98.49", 0xFu},
    {"IV", "original", "Gemini", 382, 386, 18, 14, "96.00", "95.50", "96.46", "95.98", 0xFu},
    {"IV", "zero_shot_rephrased", "GPT-4", 394, 372, 6, 28, "95.75", "98.50", "93.36", "95.86", 0xFu},
    {"IV", "zero_shot_rephrased", "GPT-3.5", 379, 354, 21, 46, "91.62", "94.75", "89.18", "91.88", 0xFu},
    {"IV", "zero_shot_rephrased", "Claude", 394, 366, 6, 34, "95.00", "98.50", "92.06", "95.17", 0xFu},
    {"IV", "zero_shot_rephrased", "Llama3", 392, 381, 8, 19, "96.62", "98.00", "95.38", "96.67", 0xFu},
    {"IV", "zero_shot_rephrased", "Gemini", 382, 324, 18, 76, "88.25", "95.50", "83.41", "89.04", 0xFu},
    {"IV", "few_shot_rephrased", "GPT-4", 394, 365, 6, 35, "94.88", "98.50", "91.84", "95.05", 0xFu},
    {"IV", "few_shot_rephrased", "GPT-3.5", 379, 337, 21, 63, "89.50", "94.75", "85.75", "90.02", 0xFu},
    {"IV", "few_shot_rephrased", "Claude", 394, 363, 6, 37, "94.62", "98.50", "91.42", "94.83", 0xFu},
    {"IV", "few_shot_rephrased", "Llama3", 392, 367, 8, 33, "94.88", "98.00", "92.24", "95.03", 0xFu},
    {"IV", "few_shot_rephrased", "Gemini", 382, 311, 18, 89, "86.62", "95.50", "81.10", "87.72", 0xFu},
}};

}  // namespace testsupport
