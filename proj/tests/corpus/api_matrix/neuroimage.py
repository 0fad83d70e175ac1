"""Segmentation of volumetric brain scans with a 3D convolutional network."""
import tensorflow as tf

VOLUME = 16
NUM_CLASSES = 4


def read_volume(filename_queue):
  """Reads one fixed-size scan from a binary record file."""
  reader = tf.FixedLengthRecordReader(record_bytes=VOLUME * VOLUME * VOLUME)
  key, record = reader.read(filename_queue)
  # Raw voxels, one byte each
  raw = tf.decode_raw(record, tf.uint8)
  volume = tf.reshape(raw, [-1, 16, 16, 16, 1])
  return volume


def network(volume, is_training):
  # Two 3D convolutions over depth, height and width
  net = tf.layers.conv3d(volume, 8, 3, padding='same', activation=tf.nn.relu)
  net = tf.layers.conv3d(net, 16, 3, padding='same', activation=tf.nn.relu)
  net = tf.layers.batch_normalization(net, training=is_training)
  logits = tf.layers.conv3d(net, NUM_CLASSES, 1, padding='same')
  return logits


def main(files):
  filename_queue = tf.train.string_input_producer(files)
  volume = read_volume(filename_queue)
  labels = tf.placeholder_with_default(tf.zeros([1, 16, 16, 16], tf.int32), [None, 16, 16, 16])
  logits = network(volume, True)
  loss = tf.losses.sparse_softmax_cross_entropy(labels=labels, logits=logits)
  train_op = tf.train.AdamOptimizer(0.001).minimize(loss)
  with tf.Session() as sess:
    sess.run(tf.global_variables_initializer())
    coord = tf.train.Coordinator()
    threads = tf.train.start_queue_runners(coord=coord)
    step = 0
    while step < 100:
      sess.run(train_op)
      step = step + 1
    coord.request_stop()
    coord.join(threads)


if __name__ == '__main__':
  main(['scans-0.bin', 'scans-1.bin'])
