// Pose model adapter: MoveNet single-pose via @tensorflow-models/pose-detection,
// which emits exactly the 17 named keypoints the wire schema expects.

import * as poseDetection from "@tensorflow-models/pose-detection";
import "@tensorflow/tfjs";

import type { ModelKeypoint } from "./wire.js";

export interface PoseEstimator {
  estimate(video: HTMLVideoElement): Promise<ModelKeypoint[]>;
}

export async function createMoveNetEstimator(): Promise<PoseEstimator> {
  const detector = await poseDetection.createDetector(
    poseDetection.SupportedModels.MoveNet,
    {
      modelType: poseDetection.movenet.modelType.SINGLEPOSE_LIGHTNING,
      // The engine does its own time-corrected smoothing; raw output here.
      enableSmoothing: false,
    },
  );
  return {
    async estimate(video: HTMLVideoElement): Promise<ModelKeypoint[]> {
      const poses = await detector.estimatePoses(video);
      if (poses.length === 0) return [];
      return poses[0]!.keypoints.map((kp) => ({
        x: kp.x,
        y: kp.y,
        score: kp.score,
        name: kp.name,
      }));
    },
  };
}
