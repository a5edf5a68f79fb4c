/// Confusion counts of every trained model and the precision, sensitivity and
/// specificity published for it, rounded to four decimals.
pub struct TableRow {
    pub label: &'static str,
    /// TP, TN, FP, FN
    pub counts: [u64; 4],
    /// precision, sensitivity, specificity
    pub published: [f64; 3],
}

pub const TABLE_ROWS: [TableRow; 42] = [
    TableRow {
        label: "stage one centralized",
        counts: [1423, 1925, 159, 110],
        published: [0.8995, 0.9282, 0.9237],
    },
    TableRow {
        label: "stage two centralized",
        counts: [700, 858, 7, 13],
        published: [0.9901, 0.9818, 0.9919],
    },
    TableRow {
        label: "stage one federated balanced interval 1",
        counts: [1260, 1964, 120, 273],
        published: [0.9130, 0.8219, 0.9424],
    },
    TableRow {
        label: "stage one federated balanced interval 2",
        counts: [1316, 2005, 79, 217],
        published: [0.9434, 0.8584, 0.9621],
    },
    TableRow {
        label: "stage one federated balanced interval 3",
        counts: [1381, 1980, 104, 152],
        published: [0.9300, 0.9008, 0.9501],
    },
    TableRow {
        label: "stage one federated balanced interval 4",
        counts: [1359, 2005, 79, 174],
        published: [0.9451, 0.8865, 0.9621],
    },
    TableRow {
        label: "stage one federated balanced interval 5",
        counts: [1377, 2010, 74, 156],
        published: [0.9490, 0.8982, 0.9645],
    },
    TableRow {
        label: "stage one federated balanced interval 6",
        counts: [1436, 1959, 125, 97],
        published: [0.9199, 0.9367, 0.9400],
    },
    TableRow {
        label: "stage one federated balanced interval 7",
        counts: [1383, 2006, 78, 150],
        published: [0.9466, 0.9022, 0.9626],
    },
    TableRow {
        label: "stage one federated balanced interval 8",
        counts: [1402, 1992, 92, 131],
        published: [0.9384, 0.9145, 0.9559],
    },
    TableRow {
        label: "stage one federated balanced interval 9",
        counts: [1388, 1978, 106, 145],
        published: [0.9290, 0.9054, 0.9491],
    },
    TableRow {
        label: "stage one federated balanced interval 10",
        counts: [1412, 1976, 108, 121],
        published: [0.9289, 0.9211, 0.9482],
    },
    TableRow {
        label: "stage two federated balanced interval 1",
        counts: [698, 850, 15, 15],
        published: [0.9790, 0.9790, 0.9827],
    },
    TableRow {
        label: "stage two federated balanced interval 2",
        counts: [701, 857, 8, 12],
        published: [0.9887, 0.9832, 0.9908],
    },
    TableRow {
        label: "stage two federated balanced interval 3",
        counts: [699, 857, 8, 14],
        published: [0.9887, 0.9804, 0.9908],
    },
    TableRow {
        label: "stage two federated balanced interval 4",
        counts: [696, 859, 6, 17],
        published: [0.9915, 0.9762, 0.9931],
    },
    TableRow {
        label: "stage two federated balanced interval 5",
        counts: [697, 861, 4, 16],
        published: [0.9943, 0.9776, 0.9954],
    },
    TableRow {
        label: "stage two federated balanced interval 6",
        counts: [703, 853, 12, 10],
        published: [0.9832, 0.9860, 0.9861],
    },
    TableRow {
        label: "stage two federated balanced interval 7",
        counts: [698, 857, 8, 15],
        published: [0.9887, 0.9790, 0.9908],
    },
    TableRow {
        label: "stage two federated balanced interval 8",
        counts: [700, 858, 7, 13],
        published: [0.9901, 0.9818, 0.9919],
    },
    TableRow {
        label: "stage two federated balanced interval 9",
        counts: [700, 854, 11, 13],
        published: [0.9845, 0.9818, 0.9873],
    },
    TableRow {
        label: "stage two federated balanced interval 10",
        counts: [700, 861, 4, 13],
        published: [0.9943, 0.9818, 0.9954],
    },
    TableRow {
        label: "stage one federated unbalanced interval 1",
        counts: [1287, 1972, 112, 246],
        published: [0.9199, 0.8395, 0.9463],
    },
    TableRow {
        label: "stage one federated unbalanced interval 2",
        counts: [1335, 2002, 82, 198],
        published: [0.9421, 0.8708, 0.9607],
    },
    TableRow {
        label: "stage one federated unbalanced interval 3",
        counts: [1409, 1989, 95, 124],
        published: [0.9368, 0.9191, 0.9544],
    },
    TableRow {
        label: "stage one federated unbalanced interval 4",
        counts: [1397, 1978, 106, 136],
        published: [0.9295, 0.9113, 0.9491],
    },
    TableRow {
        label: "stage one federated unbalanced interval 5",
        counts: [1393, 1989, 95, 140],
        published: [0.9362, 0.9087, 0.9544],
    },
    TableRow {
        label: "stage one federated unbalanced interval 6",
        counts: [1385, 1974, 110, 148],
        published: [0.9264, 0.9035, 0.9472],
    },
    TableRow {
        label: "stage one federated unbalanced interval 7",
        counts: [1400, 1980, 104, 133],
        published: [0.9309, 0.9132, 0.9501],
    },
    TableRow {
        label: "stage one federated unbalanced interval 8",
        counts: [1425, 1981, 103, 108],
        published: [0.9326, 0.9295, 0.9506],
    },
    TableRow {
        label: "stage one federated unbalanced interval 9",
        counts: [1413, 1976, 108, 120],
        published: [0.9290, 0.9217, 0.9482],
    },
    TableRow {
        label: "stage one federated unbalanced interval 10",
        counts: [1419, 1986, 98, 114],
        published: [0.9354, 0.9256, 0.9530],
    },
    TableRow {
        label: "stage two federated unbalanced interval 1",
        counts: [689, 857, 8, 24],
        published: [0.9885, 0.9663, 0.9908],
    },
    TableRow {
        label: "stage two federated unbalanced interval 2",
        counts: [697, 857, 8, 16],
        published: [0.9887, 0.9776, 0.9908],
    },
    TableRow {
        label: "stage two federated unbalanced interval 3",
        counts: [704, 861, 4, 9],
        published: [0.9944, 0.9874, 0.9954],
    },
    TableRow {
        label: "stage two federated unbalanced interval 4",
        counts: [699, 859, 6, 14],
        published: [0.9915, 0.9804, 0.9931],
    },
    TableRow {
        label: "stage two federated unbalanced interval 5",
        counts: [698, 858, 7, 15],
        published: [0.9901, 0.9790, 0.9919],
    },
    TableRow {
        label: "stage two federated unbalanced interval 6",
        counts: [697, 861, 4, 16],
        published: [0.9943, 0.9776, 0.9954],
    },
    TableRow {
        label: "stage two federated unbalanced interval 7",
        counts: [695, 859, 6, 18],
        published: [0.9914, 0.9748, 0.9931],
    },
    TableRow {
        label: "stage two federated unbalanced interval 8",
        counts: [697, 860, 5, 16],
        published: [0.9929, 0.9776, 0.9942],
    },
    TableRow {
        label: "stage two federated unbalanced interval 9",
        counts: [702, 859, 6, 11],
        published: [0.9915, 0.9846, 0.9931],
    },
    TableRow {
        label: "stage two federated unbalanced interval 10",
        counts: [702, 858, 7, 11],
        published: [0.9901, 0.9846, 0.9919],
    },
];
